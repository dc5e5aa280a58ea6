#pragma once

// Nontermination by loops: t →+ C[tσ].

#include <optional>
#include <vector>

#include "trs/rewrite.hpp"
#include "trs/term.hpp"

namespace trs {

struct LoopWitness {
  Term start;
  std::vector<StepRecord> trace;
  Position context_position;
  Substitution sigma;
};

inline constexpr std::size_t kDefaultLoopDepth = 5;

/// Breadth-first from each left-hand side (in rule order) up to `depth`
/// steps; the first step, in breadth-first order, whose result contains an
/// instance of the start term gives the witness. Steps back into terms seen
/// before count too.
inline std::optional<LoopWitness> find_loop(const Trs& R, std::size_t depth = kDefaultLoopDepth,
                                            std::size_t node_cap = kDefaultNodeCap, const Deadline& deadline = {}) {
  if (depth == 0) throw Error("usage", "loop depth must be at least 1");
  bool exhausted = false;
  for (const auto& rule : R.rules()) {
    const Term& start = rule.lhs;
    std::optional<ReductionTree> built;
    try {
      built.emplace(start, R, depth - 1, node_cap, deadline);
    } catch (const BudgetExceeded&) {
      if (deadline.expired()) throw;
      exhausted = true;
      continue;
    }
    const ReductionTree& tree = *built;
    for (std::size_t i = 0; i < tree.nodes().size(); ++i) {
      const auto& node = tree.nodes()[i];
      if (node.depth >= depth) continue;
      check_deadline(deadline);
      for (const auto& rx : redexes(node.term, R)) {
        Term u = contract(node.term, rx);
        for (const auto& p : fun_positions(u)) {
          const Term& sub = subterm_at(u, p);
          if (sub.name() != start.name() || sub.arity() != start.arity()) continue;
          if (auto sigma = match(start, sub)) {
            auto trace = tree.steps_to(i);
            trace.push_back(StepRecord{rx.position, R.label(rx.rule_index)});
            return LoopWitness{start, trace, p, *sigma};
          }
        }
      }
    }
  }
  if (exhausted) throw BudgetExceeded("loop search exceeded " + std::to_string(node_cap) + " terms");
  return std::nullopt;
}

/// Applies `step` to `t`; nullopt when the named rule does not match there.
inline std::optional<Term> replay_step(const Term& t, const StepRecord& step, const Trs& R) {
  auto idx = R.index_of(step.rule);
  if (!idx || !is_valid_position(t, step.position)) return std::nullopt;
  const Term& sub = subterm_at(t, step.position);
  auto sigma = match(R[*idx].lhs, sub);
  if (!sigma) return std::nullopt;
  return replace_at(t, step.position, apply_subst(R[*idx].rhs, *sigma));
}

/// Final term of the replayed trace, if every step applies.
inline std::optional<Term> replay(const Term& start, const std::vector<StepRecord>& trace, const Trs& R) {
  Term t = start;
  for (const auto& s : trace) {
    auto u = replay_step(t, s, R);
    if (!u) return std::nullopt;
    t = *u;
  }
  return t;
}

/// Mechanical check of a witness: a non-empty trace that applies, ending in a
/// term with startσ at context_position.
inline bool replay_loop(const LoopWitness& w, const Trs& R) {
  if (w.trace.empty()) return false;
  auto end = replay(w.start, w.trace, R);
  if (!end || !is_valid_position(*end, w.context_position)) return false;
  return subterm_at(*end, w.context_position) == apply_subst(w.start, w.sigma);
}

}  // namespace trs
