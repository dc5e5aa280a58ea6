#pragma once

// Confluence: orthogonality, Newman's lemma with exhaustive critical pair
// joining, and non-confluence witnesses with two distinct normal forms.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "trs/critical_pairs.hpp"
#include "trs/loop.hpp"
#include "trs/rewrite.hpp"
#include "trs/termination.hpp"

namespace trs {

inline bool is_left_linear(const Trs& R) {
  return std::all_of(R.rules().begin(), R.rules().end(), [](const Rule& r) { return is_linear(r.lhs); });
}

inline bool is_orthogonal(const Trs& R) { return is_left_linear(R) && critical_pairs(R).empty(); }

/// u →* left and u →* right, both normal forms, left ≠ right.
struct NonConfluenceWitness {
  Term top;
  Term left;
  Term right;
  std::vector<StepRecord> left_steps;
  std::vector<StepRecord> right_steps;
};

inline bool replay_witness(const NonConfluenceWitness& w, const Trs& R) {
  auto l = replay(w.top, w.left_steps, R);
  auto r = replay(w.top, w.right_steps, R);
  return l && r && *l == w.left && *r == w.right && w.left != w.right && is_normal_form(w.left, R) &&
         is_normal_form(w.right, R);
}

struct CriticalPairJoin {
  CriticalPair cp;
  bool joined = false;
  std::optional<Term> common;
  std::vector<Term> left_path;   // cp.left first
  std::vector<Term> right_path;  // cp.right first
};

inline constexpr std::size_t kDefaultWitnessDepth = 8;
inline constexpr std::size_t kDefaultNewmanFuel = 100000;

namespace detail {

/// The constant used to instantiate variables of seed terms.
inline std::string seed_constant(const Trs& R) {
  std::string c = "e";
  while (true) {
    auto a = R.arity_of(c);
    if (!a || *a == 0) return c;
    c += "'";
  }
}

inline Term ground_with(const Term& t, const std::string& c) {
  Substitution sigma;
  for (const auto& x : variables(t)) sigma.bind(x, Term::app(c));
  return apply_subst(t, sigma);
}

struct WitnessCandidate {
  NonConfluenceWitness witness;
  std::size_t sum;
  std::size_t max;
};

/// Best pair of distinct normal forms reachable from `u` within `depth`:
/// the two closest, ties by print order.
inline std::optional<WitnessCandidate> candidate_from(const Term& u, const Trs& R, std::size_t depth,
                                                      std::size_t node_cap, const Deadline& deadline) {
  ReductionTree tree(u, R, depth, node_cap, deadline);
  std::vector<std::size_t> nfs;
  for (std::size_t i = 0; i < tree.nodes().size(); ++i)
    if (is_normal_form(tree.nodes()[i].term, R)) nfs.push_back(i);
  if (nfs.size() < 2) return std::nullopt;
  std::stable_sort(nfs.begin(), nfs.end(), [&](std::size_t a, std::size_t b) {
    const auto& na = tree.nodes()[a];
    const auto& nb = tree.nodes()[b];
    if (na.depth != nb.depth) return na.depth < nb.depth;
    return to_string(na.term) < to_string(nb.term);
  });
  std::size_t a = nfs[0];
  std::size_t b = nfs[1];
  std::size_t da = tree.nodes()[a].depth;
  std::size_t db = tree.nodes()[b].depth;
  return WitnessCandidate{
      NonConfluenceWitness{u, tree.nodes()[a].term, tree.nodes()[b].term, tree.steps_to(a), tree.steps_to(b)},
      da + db, std::max(da, db)};
}

}  // namespace detail

/// Seeds: critical peak tops (critical pair order), then every left-hand
/// side with its variables replaced by the constant e. Among seeds with two
/// distinct normal forms in their depth-bounded reduction tree, picks the
/// least total distance to the two normal forms, then the least maximum
/// distance, then the larger seed, then the earlier seed.
inline std::optional<NonConfluenceWitness> non_confluence_witness(const Trs& R,
                                                                  std::size_t depth = kDefaultWitnessDepth,
                                                                  std::size_t node_cap = kDefaultNodeCap,
                                                                  const Deadline& deadline = {}) {
  std::vector<Term> seeds;
  TermMap<bool> seen;
  auto add = [&](const Term& t) {
    if (seen.emplace(t, true).second) seeds.push_back(t);
  };
  for (const auto& cp : critical_pairs(R)) add(cp.peak_top);
  std::string c = detail::seed_constant(R);
  for (const auto& r : R.rules()) add(detail::ground_with(r.lhs, c));
  std::optional<detail::WitnessCandidate> best;
  bool exhausted = false;
  for (const auto& u : seeds) {
    std::optional<detail::WitnessCandidate> cand;
    try {
      cand = detail::candidate_from(u, R, depth, node_cap, deadline);
    } catch (const BudgetExceeded&) {
      if (deadline.expired()) throw;
      exhausted = true;
      continue;
    }
    if (!cand) continue;
    if (!best || cand->sum < best->sum || (cand->sum == best->sum && cand->max < best->max) ||
        (cand->sum == best->sum && cand->max == best->max && cand->witness.top.size() > best->witness.top.size()))
      best = cand;
  }
  if (best) return best->witness;
  if (exhausted) throw BudgetExceeded("witness search exceeded " + std::to_string(node_cap) + " terms");
  return std::nullopt;
}

struct NewmanResult {
  Verdict verdict = Verdict::Maybe;
  std::vector<CriticalPairJoin> joins;
  std::optional<NonConfluenceWitness> witness;
};

namespace detail {
inline std::vector<Term> trace_from(const Term& t, const NormalizeResult& n) {
  std::vector<Term> out{t};
  out.insert(out.end(), n.trace.begin(), n.trace.end());
  return out;
}
}  // namespace detail

/// For a terminating R: every critical pair is normalized on both sides.
/// Equal normal forms everywhere gives Yes; a pair with distinct normal
/// forms gives No with its peak as witness; running out of fuel gives Maybe.
inline NewmanResult newman_confluence(const Trs& R, const TerminationReport& termination,
                                      std::size_t fuel = kDefaultNewmanFuel, const Deadline& deadline = {}) {
  if (termination.verdict != Verdict::Yes || !verify(termination, R))
    throw Error("usage", "Newman's criterion needs a verified termination proof");
  NewmanResult out;
  bool all = true;
  for (const auto& cp : critical_pairs(R)) {
    check_deadline(deadline);
    auto l = normalize(cp.left, R, Strategy::LeftmostOutermost, fuel, deadline);
    auto r = normalize(cp.right, R, Strategy::LeftmostOutermost, fuel, deadline);
    CriticalPairJoin j{cp, false, std::nullopt, detail::trace_from(cp.left, l), detail::trace_from(cp.right, r)};
    if (!l.normal_form() || !r.normal_form()) {
      all = false;
    } else if (l.term == r.term) {
      j.joined = true;
      j.common = l.term;
    } else if (!out.witness) {
      const auto& src = cp.source;
      std::vector<StepRecord> ls{StepRecord{src.position, R.label(src.inner_index)}};
      std::vector<StepRecord> rs{StepRecord{Position{}, R.label(src.outer_index)}};
      ls.insert(ls.end(), l.steps.begin(), l.steps.end());
      rs.insert(rs.end(), r.steps.begin(), r.steps.end());
      out.witness = NonConfluenceWitness{cp.peak_top, l.term, r.term, ls, rs};
    }
    out.joins.push_back(std::move(j));
  }
  if (out.witness)
    out.verdict = Verdict::No;
  else if (all)
    out.verdict = Verdict::Yes;
  return out;
}

/// Bounded joinability of every critical pair (local confluence evidence).
inline std::vector<CriticalPairJoin> join_critical_pairs(const Trs& R, std::size_t depth = kDefaultJoinDepth,
                                                         std::size_t node_cap = kDefaultNodeCap,
                                                         const Deadline& deadline = {}) {
  std::vector<CriticalPairJoin> out;
  for (const auto& cp : critical_pairs(R)) {
    CriticalPairJoin j{cp, false, std::nullopt, {}, {}};
    try {
      auto res = joinable(cp.left, cp.right, R, depth, node_cap, deadline);
      j.joined = res.joined;
      j.common = res.witness;
      j.left_path = res.left_path;
      j.right_path = res.right_path;
    } catch (const BudgetExceeded&) {
      if (deadline.expired()) throw;
    }
    out.push_back(std::move(j));
  }
  return out;
}

struct ConfluenceConfig {
  TerminationConfig termination;
  std::size_t fuel = kDefaultNewmanFuel;
  std::size_t join_depth = kDefaultJoinDepth;
  std::size_t witness_depth = kDefaultWitnessDepth;
  std::size_t node_cap = kDefaultNodeCap;
  Deadline deadline;
};

struct ConfluenceReport {
  Verdict verdict = Verdict::Maybe;
  std::string reason;  // orthogonal | newman | witness, empty for Maybe
  std::vector<CriticalPairJoin> critical_pairs;
  std::optional<TerminationReport> termination;
  std::optional<NonConfluenceWitness> witness;
  std::vector<std::string> notes;
};

/// Orthogonality, then Newman's lemma, then witness search.
inline ConfluenceReport analyze_confluence(const Trs& R, ConfluenceConfig cfg = {}) {
  ConfluenceReport rep;
  if (cfg.deadline.bounded() && !cfg.termination.deadline.bounded()) cfg.termination.deadline = cfg.deadline;
  try {
    if (is_orthogonal(R)) {
      rep.verdict = Verdict::Yes;
      rep.reason = "orthogonal";
      return rep;
    }
    rep.notes.push_back(is_left_linear(R) ? "not orthogonal: critical pairs exist" : "not orthogonal: not left-linear");
    auto term = prove_termination(R, cfg.termination);
    rep.termination = term;
    if (term.verdict == Verdict::Yes) {
      auto nm = newman_confluence(R, term, cfg.fuel, cfg.deadline);
      rep.critical_pairs = nm.joins;
      if (nm.verdict == Verdict::Yes) {
        rep.verdict = Verdict::Yes;
        rep.reason = "newman";
        return rep;
      }
      if (nm.verdict == Verdict::No) {
        rep.verdict = Verdict::No;
        rep.reason = "newman";
        rep.witness = nm.witness;
        return rep;
      }
      rep.notes.push_back("newman: normalization ran out of fuel on some critical pair");
    } else {
      rep.notes.push_back("newman: termination not proved");
      rep.critical_pairs = join_critical_pairs(R, cfg.join_depth, cfg.node_cap, cfg.deadline);
    }
    if (auto w = non_confluence_witness(R, cfg.witness_depth, cfg.node_cap, cfg.deadline)) {
      rep.verdict = Verdict::No;
      rep.reason = "witness";
      rep.witness = *w;
      return rep;
    }
    rep.notes.push_back("witness search: no term with two normal forms within depth " +
                        std::to_string(cfg.witness_depth));
  } catch (const BudgetExceeded& e) {
    rep.notes.push_back(std::string("stopped: ") + e.what());
  }
  return rep;
}

}  // namespace trs
