#pragma once

#include <deque>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "trs/budget.hpp"
#include "trs/term.hpp"

namespace trs {

enum class Strategy { LeftmostInnermost, LeftmostOutermost, Maximal, Full };

inline std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::LeftmostInnermost: return "li";
    case Strategy::LeftmostOutermost: return "lo";
    case Strategy::Maximal: return "max";
    case Strategy::Full: return "full";
  }
  return "?";
}

inline Strategy parse_strategy(const std::string& s) {
  if (s == "li") return Strategy::LeftmostInnermost;
  if (s == "lo") return Strategy::LeftmostOutermost;
  if (s == "max") return Strategy::Maximal;
  if (s == "full") return Strategy::Full;
  throw Error("usage", "unknown strategy '" + s + "' (expected li, lo, max or full)");
}

struct Redex {
  Position position;
  std::size_t rule_index = 0;
  Rule rule;
  Substitution sigma;
};

/// Result of contracting `redex` inside `t`.
inline Term contract(const Term& t, const Redex& redex) {
  return replace_at(t, redex.position, apply_subst(redex.rule.rhs, redex.sigma));
}

/// First rule (in listing order) whose left-hand side matches `t` at the root.
inline std::optional<Redex> root_redex(const Term& t, const Trs& R, const Position& at = {}) {
  if (t.is_var()) return std::nullopt;
  for (std::size_t i = 0; i < R.size(); ++i) {
    const Rule& rule = R[i];
    if (rule.lhs.name() != t.name() || rule.lhs.arity() != t.arity()) continue;
    if (auto sigma = match(rule.lhs, t)) return Redex{at, i, rule, std::move(*sigma)};
  }
  return std::nullopt;
}

/// All redexes of `t`: positions in preorder, rules in listing order at each
/// position.
namespace detail {
inline void collect_redexes(const Term& t, const Trs& R, std::vector<int>& path, std::vector<Redex>& out) {
  if (t.is_var()) return;
  for (std::size_t i = 0; i < R.size(); ++i) {
    const Rule& rule = R[i];
    if (rule.lhs.name() != t.name() || rule.lhs.arity() != t.arity()) continue;
    if (auto sigma = match(rule.lhs, t)) out.push_back(Redex{Position(path), i, rule, std::move(*sigma)});
  }
  for (std::size_t k = 0; k < t.arity(); ++k) {
    path.push_back(static_cast<int>(k) + 1);
    collect_redexes(t.arg(k), R, path, out);
    path.pop_back();
  }
}
}  // namespace detail

inline std::vector<Redex> redexes(const Term& t, const Trs& R) {
  std::vector<Redex> out;
  std::vector<int> path;
  detail::collect_redexes(t, R, path, out);
  return out;
}

inline bool is_normal_form(const Term& t, const Trs& R) {
  if (t.is_var()) return true;
  if (root_redex(t, R)) return false;
  for (const auto& a : t.args())
    if (!is_normal_form(a, R)) return false;
  return true;
}

namespace detail {
inline std::optional<Redex> root_redex_at(const Term& t, const Trs& R, const std::vector<int>& path) {
  if (t.is_var()) return std::nullopt;
  for (std::size_t i = 0; i < R.size(); ++i) {
    const Rule& rule = R[i];
    if (rule.lhs.name() != t.name() || rule.lhs.arity() != t.arity()) continue;
    if (auto sigma = match(rule.lhs, t)) return Redex{Position(path), i, rule, std::move(*sigma)};
  }
  return std::nullopt;
}
/// Subterms already known to be normal forms; valid for one TRS.
using NormalCache = std::unordered_set<Term, TermHash>;

inline std::optional<Redex> innermost(const Term& t, const Trs& R, std::vector<int>& path,
                                      NormalCache* nf = nullptr) {
  if (t.is_var() || (nf && nf->count(t))) return std::nullopt;
  for (std::size_t i = 0; i < t.arity(); ++i) {
    path.push_back(static_cast<int>(i) + 1);
    auto r = innermost(t.arg(i), R, path, nf);
    path.pop_back();
    if (r) return r;
  }
  auto r = root_redex_at(t, R, path);
  if (!r && nf) nf->insert(t);
  return r;
}
inline std::optional<Redex> outermost(const Term& t, const Trs& R, std::vector<int>& path,
                                      NormalCache* nf = nullptr) {
  if (t.is_var() || (nf && nf->count(t))) return std::nullopt;
  if (auto r = root_redex_at(t, R, path)) return r;
  for (std::size_t i = 0; i < t.arity(); ++i) {
    path.push_back(static_cast<int>(i) + 1);
    auto r = outermost(t.arg(i), R, path, nf);
    path.pop_back();
    if (r) return r;
  }
  if (nf) nf->insert(t);
  return std::nullopt;
}
inline void all_outermost(const Term& t, const Trs& R, std::vector<int>& path, std::vector<Redex>& out) {
  if (t.is_var()) return;
  if (auto r = root_redex_at(t, R, path)) {
    out.push_back(std::move(*r));
    return;
  }
  for (std::size_t i = 0; i < t.arity(); ++i) {
    path.push_back(static_cast<int>(i) + 1);
    all_outermost(t.arg(i), R, path, out);
    path.pop_back();
  }
}
}  // namespace detail

/// Outermost redexes, left to right. They are pairwise parallel.
inline std::vector<Redex> outermost_redexes(const Term& t, const Trs& R) {
  std::vector<Redex> out;
  std::vector<int> path;
  detail::all_outermost(t, R, path, out);
  return out;
}

struct StepResult {
  Term term;
  Redex redex;  // for Maximal: the leftmost contracted redex
  std::size_t contracted = 1;
};

/// One step under `strategy`; nullopt iff `t` is a normal form. Maximal
/// contracts every outermost redex simultaneously.
inline std::optional<StepResult> step(const Term& t, const Trs& R, Strategy strategy,
                                      detail::NormalCache* nf = nullptr) {
  std::vector<int> path;
  switch (strategy) {
    case Strategy::LeftmostInnermost:
      if (auto r = detail::innermost(t, R, path, nf)) return StepResult{contract(t, *r), *r, 1};
      return std::nullopt;
    case Strategy::LeftmostOutermost:
    case Strategy::Full:
      if (auto r = detail::outermost(t, R, path, nf)) return StepResult{contract(t, *r), *r, 1};
      return std::nullopt;
    case Strategy::Maximal: {
      auto all = outermost_redexes(t, R);
      if (all.empty()) return std::nullopt;
      Term u = t;
      for (const auto& r : all) u = contract(u, r);
      return StepResult{u, all.front(), all.size()};
    }
  }
  return std::nullopt;
}

struct StepRecord {
  Position position;
  std::string rule;
  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct NormalizeResult {
  enum class Outcome { NormalForm, FuelExhausted, Stuck };
  Outcome outcome = Outcome::NormalForm;
  Term term;
  std::vector<StepRecord> steps;
  std::vector<Term> trace;  // term after each step

  bool normal_form() const { return outcome == Outcome::NormalForm; }
};

inline std::string to_string(NormalizeResult::Outcome o) {
  switch (o) {
    case NormalizeResult::Outcome::NormalForm: return "normal-form";
    case NormalizeResult::Outcome::FuelExhausted: return "fuel-exhausted";
    case NormalizeResult::Outcome::Stuck: return "stuck";
  }
  return "?";
}

inline NormalizeResult normalize(const Term& t, const Trs& R, Strategy strategy, std::size_t fuel,
                                 const Deadline& deadline = {}) {
  if (fuel == 0) throw Error("usage", "fuel must be at least 1");
  NormalizeResult res{NormalizeResult::Outcome::NormalForm, t, {}, {}};
  detail::NormalCache nf;
  for (std::size_t i = 0; i < fuel; ++i) {
    if ((i & 63) == 63) check_deadline(deadline);
    auto s = step(res.term, R, strategy, &nf);
    if (!s) return res;
    res.steps.push_back(StepRecord{s->redex.position, R.label(s->redex.rule_index)});
    res.term = s->term;
    res.trace.push_back(res.term);
  }
  if (!is_normal_form(res.term, R)) res.outcome = NormalizeResult::Outcome::FuelExhausted;
  return res;
}

/// One-step reducts of `t`, deduplicated, in redex order.
inline std::vector<Term> successors(const Term& t, const Trs& R) {
  std::vector<Term> out;
  std::unordered_set<Term, TermHash> seen;
  for (const auto& r : redexes(t, R)) {
    Term u = contract(t, r);
    if (seen.insert(u).second) out.push_back(std::move(u));
  }
  return out;
}

inline constexpr std::size_t kDefaultNodeCap = 200000;

/// Terms reachable from `t` in at most `depth` steps, in breadth-first
/// discovery order. Throws BudgetExceeded past `node_cap` terms.
inline std::vector<Term> reachable(const Term& t, const Trs& R, std::size_t depth,
                                   std::size_t node_cap = kDefaultNodeCap, const Deadline& deadline = {}) {
  std::vector<Term> order{t};
  std::unordered_set<Term, TermHash> seen{t};
  std::size_t frontier_begin = 0;
  for (std::size_t d = 0; d < depth; ++d) {
    std::size_t frontier_end = order.size();
    if (frontier_begin == frontier_end) break;
    for (std::size_t i = frontier_begin; i < frontier_end; ++i) {
      check_deadline(deadline);
      for (auto& u : successors(order[i], R)) {
        if (!seen.insert(u).second) continue;
        order.push_back(std::move(u));
        if (order.size() > node_cap)
          throw BudgetExceeded("reachable set exceeds " + std::to_string(node_cap) + " terms");
      }
    }
    frontier_begin = frontier_end;
  }
  return order;
}

/// Breadth-first reduction tree with parent links, used to reconstruct
/// derivations.
class ReductionTree {
 public:
  struct Node {
    Term term;
    std::size_t parent;  // == index for the root
    std::size_t depth;
    StepRecord via;
  };

  ReductionTree(const Term& root, const Trs& R, std::size_t depth, std::size_t node_cap = kDefaultNodeCap,
                const Deadline& deadline = {}) {
    nodes_.push_back(Node{root, 0, 0, {}});
    index_.emplace(root, 0);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].depth >= depth) continue;
      check_deadline(deadline);
      Term cur = nodes_[i].term;
      std::size_t d = nodes_[i].depth;
      for (const auto& rx : redexes(cur, R)) {
        Term u = contract(cur, rx);
        if (index_.contains(u)) continue;
        index_.emplace(u, nodes_.size());
        nodes_.push_back(Node{u, i, d + 1, StepRecord{rx.position, R.label(rx.rule_index)}});
        if (nodes_.size() > node_cap)
          throw BudgetExceeded("reduction tree exceeds " + std::to_string(node_cap) + " terms");
      }
    }
  }

  const std::vector<Node>& nodes() const { return nodes_; }
  std::optional<std::size_t> find(const Term& t) const {
    auto it = index_.find(t);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(const Term& t) const { return index_.contains(t); }

  /// Terms along the derivation root →* nodes()[i], root first.
  std::vector<Term> path_to(std::size_t i) const {
    std::vector<Term> out;
    while (true) {
      out.push_back(nodes_[i].term);
      if (nodes_[i].parent == i) break;
      i = nodes_[i].parent;
    }
    return {out.rbegin(), out.rend()};
  }
  std::vector<StepRecord> steps_to(std::size_t i) const {
    std::vector<StepRecord> out;
    while (nodes_[i].parent != i) {
      out.push_back(nodes_[i].via);
      i = nodes_[i].parent;
    }
    return {out.rbegin(), out.rend()};
  }

 private:
  std::vector<Node> nodes_;
  TermMap<std::size_t> index_;
};

}  // namespace trs
