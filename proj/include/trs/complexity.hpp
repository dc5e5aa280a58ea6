#pragma once

// Derivation heights on the reduction graph, and empirical derivational and
// runtime complexity over ground terms of a given size.

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "trs/rewrite.hpp"
#include "trs/term.hpp"

namespace trs {

struct DhResult {
  enum class Kind { Value, Infinite, BudgetExceeded };
  Kind kind = Kind::Value;
  std::size_t value = 0;
  std::vector<Term> derivation;     // a longest derivation, start first (Value)
  std::vector<StepRecord> steps;    // its steps
  std::vector<Term> cycle;          // t1 → t2 → ... → t1 reachable from the start (Infinite)
  std::size_t explored = 0;         // graph nodes visited

  bool finite() const { return kind == Kind::Value; }
};

inline std::string to_string(DhResult::Kind k) {
  switch (k) {
    case DhResult::Kind::Value: return "value";
    case DhResult::Kind::Infinite: return "infinite";
    case DhResult::Kind::BudgetExceeded: return "budget-exceeded";
  }
  return "?";
}

/// Longest path from `t` in the reduction graph, by memoized depth-first
/// search; a grey successor closes a cycle.
inline DhResult dh(const Term& t, const Trs& R, std::size_t node_cap = kDefaultNodeCap, const Deadline& deadline = {}) {
  struct Node {
    Term term;
    std::vector<std::size_t> succ;
    std::vector<StepRecord> via;
    int color = 0;  // 0 white, 1 grey, 2 black
    std::size_t height = 0;
    std::size_t best = 0;
  };
  std::vector<Node> nodes;
  TermMap<std::size_t> index;
  auto intern = [&](const Term& u) {
    auto [it, inserted] = index.emplace(u, nodes.size());
    if (inserted) nodes.push_back(Node{u, {}, {}, 0, 0, 0});
    return it->second;
  };
  DhResult res;
  intern(t);
  struct Frame {
    std::size_t node;
    std::size_t next;
  };
  std::vector<Frame> stack;
  auto open = [&](std::size_t n) {
    nodes[n].color = 1;
    for (const auto& rx : redexes(nodes[n].term, R)) {
      Term u = contract(nodes[n].term, rx);
      std::size_t k = intern(u);
      if (std::find(nodes[n].succ.begin(), nodes[n].succ.end(), k) != nodes[n].succ.end()) continue;
      nodes[n].succ.push_back(k);
      nodes[n].via.push_back(StepRecord{rx.position, R.label(rx.rule_index)});
    }
    stack.push_back(Frame{n, 0});
  };
  open(0);
  while (!stack.empty()) {
    if (nodes.size() > node_cap) {
      res.kind = DhResult::Kind::BudgetExceeded;
      res.explored = nodes.size();
      return res;
    }
    if ((nodes.size() & 1023) == 0) check_deadline(deadline);
    Frame& fr = stack.back();
    Node& n = nodes[fr.node];
    if (fr.next == n.succ.size()) {
      n.color = 2;
      stack.pop_back();
      continue;
    }
    std::size_t k = n.succ[fr.next];
    std::size_t pos = fr.next++;
    if (nodes[k].color == 1) {
      res.kind = DhResult::Kind::Infinite;
      auto from = std::find_if(stack.begin(), stack.end(), [&](const Frame& f) { return f.node == k; });
      for (auto it = from; it != stack.end(); ++it) res.cycle.push_back(nodes[it->node].term);
      res.cycle.push_back(nodes[k].term);
      res.explored = nodes.size();
      return res;
    }
    if (nodes[k].color == 0) {
      fr.next = pos;  // revisit this edge once k is finished
      open(k);
      continue;
    }
    if (nodes[k].height + 1 > n.height) {
      n.height = nodes[k].height + 1;
      n.best = pos;
    }
  }
  res.value = nodes[0].height;
  res.explored = nodes.size();
  std::size_t cur = 0;
  res.derivation.push_back(t);
  while (!nodes[cur].succ.empty()) {
    std::size_t b = nodes[cur].best;
    res.steps.push_back(nodes[cur].via[b]);
    cur = nodes[cur].succ[b];
    res.derivation.push_back(nodes[cur].term);
  }
  return res;
}

inline std::set<std::string> defined_symbols(const Trs& R) {
  std::set<std::string> out;
  for (const auto& r : R.rules()) out.insert(r.lhs.name());
  return out;
}

inline const std::string kBottom = "⊥";

/// Signature used for enumeration: R's symbols plus ⊥ when R has no constant.
inline std::vector<Symbol> enumeration_signature(const Trs& R) {
  auto sig = R.signature();
  bool has_constant = std::any_of(sig.begin(), sig.end(), [](const Symbol& s) { return s.arity == 0; });
  if (!has_constant) sig.push_back(Symbol{kBottom, 0});
  return sig;
}

/// Defined root, constructor-only arguments.
inline bool is_basic(const Term& t, const Trs& R) {
  auto defined = defined_symbols(R);
  if (t.is_var() || !defined.contains(t.name())) return false;
  for (const auto& p : fun_positions(t))
    if (!p.is_root() && defined.contains(subterm_at(t, p).name())) return false;
  return true;
}

namespace detail {
/// Appends every f(t1..tm) of size k with arguments drawn from `table`
/// (table[j] = terms of size j), arguments varying rightmost-fastest.
inline void apply_all(const Symbol& f, const std::vector<std::vector<Term>>& table, std::size_t k,
                      std::vector<Term>& out, std::size_t cap) {
  if (f.arity == 0) {
    if (k == 1) out.push_back(Term::app(f.name));
    return;
  }
  if (k < f.arity + 1) return;
  std::vector<Term> args;
  auto rec = [&](auto&& self, std::size_t i, std::size_t remaining) -> void {
    if (i + 1 == f.arity) {
      if (remaining >= table.size()) return;
      for (const auto& t : table[remaining]) {
        args.push_back(t);
        out.push_back(Term::app(f.name, args));
        args.pop_back();
        if (out.size() > cap) throw BudgetExceeded("term enumeration exceeds " + std::to_string(cap) + " terms");
      }
      return;
    }
    for (std::size_t sz = 1; sz + (f.arity - 1 - i) <= remaining && sz < table.size(); ++sz)
      for (const auto& t : table[sz]) {
        args.push_back(t);
        self(self, i + 1, remaining - sz);
        args.pop_back();
      }
  };
  rec(rec, 0, k - 1);
}

/// Ground terms over `sig` grouped by size; table[k] holds size k ≤ n.
inline std::vector<std::vector<Term>> terms_by_size(const std::vector<Symbol>& sig, std::size_t n,
                                                    std::size_t cap = 2'000'000) {
  std::vector<std::vector<Term>> table(n + 1);
  for (std::size_t k = 1; k <= n; ++k)
    for (const auto& f : sig) apply_all(f, table, k, table[k], cap);
  return table;
}
}  // namespace detail

/// Ground terms of size exactly n over enumeration_signature(R).
inline std::vector<Term> ground_terms(const Trs& R, std::size_t n) {
  if (n == 0) throw Error("usage", "term size must be at least 1");
  return detail::terms_by_size(enumeration_signature(R), n)[n];
}

/// Basic ground terms of size exactly n: a defined root applied to
/// constructor terms (⊥ joins the constructors when they have no constant).
inline std::vector<Term> basic_terms(const Trs& R, std::size_t n) {
  if (n == 0) throw Error("usage", "term size must be at least 1");
  auto defined = defined_symbols(R);
  std::vector<Symbol> constructors;
  for (const auto& s : R.signature())
    if (!defined.contains(s.name)) constructors.push_back(s);
  if (std::none_of(constructors.begin(), constructors.end(), [](const Symbol& s) { return s.arity == 0; }))
    constructors.push_back(Symbol{kBottom, 0});
  auto table = detail::terms_by_size(constructors, n - 1);
  std::vector<Term> out;
  for (const auto& f : R.signature())
    if (defined.contains(f.name)) detail::apply_all(f, table, n, out, 2'000'000);
  return out;
}

struct CurvePoint {
  std::string kind;  // dc | rc
  std::size_t n = 0;
  std::size_t value = 0;
  Term witness;
  std::size_t terms = 0;  // how many terms of size n were measured
};

namespace detail {
inline CurvePoint max_dh(const std::string& kind, std::size_t n, const std::vector<Term>& family, const Trs& R,
                         std::size_t node_cap, const Deadline& deadline) {
  if (family.empty()) throw Error("empty-family", "no " + kind + " terms of size " + std::to_string(n));
  std::optional<CurvePoint> best;
  for (const auto& t : family) {
    auto d = dh(t, R, node_cap, deadline);
    if (d.kind == DhResult::Kind::Infinite)
      throw Error("infinite-at-size", kind + "(" + std::to_string(n) + "): " + to_string(t) +
                                          " has an infinite derivation", to_string(t));
    if (d.kind == DhResult::Kind::BudgetExceeded)
      throw BudgetExceeded(kind + "(" + std::to_string(n) + "): dh(" + to_string(t) + ") exceeds the node cap");
    if (!best || d.value > best->value || (d.value == best->value && to_string(t) < to_string(best->witness)))
      best = CurvePoint{kind, n, d.value, t, 0};
  }
  best->terms = family.size();
  return *best;
}
}  // namespace detail

/// max dh over all ground terms of size n; ties go to the least witness in
/// print order.
inline CurvePoint dc_empirical(const Trs& R, std::size_t n, std::size_t node_cap = kDefaultNodeCap,
                               const Deadline& deadline = {}) {
  return detail::max_dh("dc", n, ground_terms(R, n), R, node_cap, deadline);
}

inline CurvePoint rc_empirical(const Trs& R, std::size_t n, std::size_t node_cap = kDefaultNodeCap,
                               const Deadline& deadline = {}) {
  return detail::max_dh("rc", n, basic_terms(R, n), R, node_cap, deadline);
}

inline std::string csv_header() { return "kind,n,value,witness\n"; }

inline std::string csv_row(const CurvePoint& p) {
  std::string w = to_string(p.witness);
  bool quote = w.find(',') != std::string::npos || w.find('"') != std::string::npos;
  if (quote) {
    std::string q = "\"";
    for (char c : w) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    w = q + "\"";
  }
  return p.kind + "," + std::to_string(p.n) + "," + std::to_string(p.value) + "," + w + "\n";
}

}  // namespace trs
