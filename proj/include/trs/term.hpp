#pragma once

// First-order terms, positions, substitutions, matching and syntactic
// unification. Terms are immutable and share structure; copying a Term
// copies a pointer.

#include <algorithm>
#include <atomic>
#include <compare>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "trs/error.hpp"

namespace trs {

struct Symbol {
  std::string name;
  std::size_t arity = 0;

  friend auto operator<=>(const Symbol&, const Symbol&) = default;
  friend bool operator==(const Symbol&, const Symbol&) = default;
};

class Term {
 public:
  static Term var(std::string name) {
    return Term(std::make_shared<const Node>(true, std::move(name), std::vector<Term>{}));
  }
  static Term app(std::string name, std::vector<Term> args = {}) {
    return Term(std::make_shared<const Node>(false, std::move(name), std::move(args)));
  }
  static Term app(std::string name, std::initializer_list<Term> args) {
    return app(std::move(name), std::vector<Term>(args));
  }

  bool is_var() const { return node_->is_var; }
  bool is_app() const { return !node_->is_var; }
  const std::string& name() const { return node_->name; }
  const std::vector<Term>& args() const { return node_->args; }
  const Term& arg(std::size_t i) const { return node_->args[i]; }
  std::size_t arity() const { return node_->args.size(); }
  Symbol symbol() const { return Symbol{node_->name, node_->args.size()}; }

  /// Number of variable and function-symbol occurrences, so |f(x)| = 2.
  std::size_t size() const { return node_->size; }
  std::size_t hash() const { return node_->hash; }

  friend bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (a.node_->hash != b.node_->hash || a.node_->size != b.node_->size) return false;
    if (a.node_->is_var != b.node_->is_var || a.node_->name != b.node_->name) return false;
    return a.node_->args == b.node_->args;
  }

  /// Structural total order: variables before applications, then by name,
  /// arity and arguments. Used for deterministic containers only.
  friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (a.is_var() != b.is_var()) return a.is_var() ? std::strong_ordering::less : std::strong_ordering::greater;
    if (auto c = a.name() <=> b.name(); c != 0) return c;
    if (auto c = a.arity() <=> b.arity(); c != 0) return c;
    for (std::size_t i = 0; i < a.arity(); ++i)
      if (auto c = a.arg(i) <=> b.arg(i); c != 0) return c;
    return std::strong_ordering::equal;
  }

 private:
  struct Node {
    Node(bool v, std::string n, std::vector<Term> a)
        : is_var(v), name(std::move(n)), args(std::move(a)) {
      size = 1;
      hash = std::hash<std::string>{}(name) ^ (is_var ? 0x9e3779b97f4a7c15ULL : 0x51ed270b27ULL);
      for (const auto& t : args) {
        size += t.size();
        std::size_t h = t.hash() + 0x9e3779b97f4a7c15ULL + (hash << 6) + (hash >> 2);
        hash = (hash ^ h) * 1099511628211ULL;
      }
    }
    bool is_var;
    std::string name;
    std::vector<Term> args;
    std::size_t size;
    std::size_t hash;
  };

  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept { return t.hash(); }
};

template <class V>
using TermMap = std::unordered_map<Term, V, TermHash>;

/// Path of 1-based argument indices; the empty path is the root.
class Position {
 public:
  Position() = default;
  Position(std::initializer_list<int> path) : path_(path) {}
  explicit Position(std::vector<int> path) : path_(std::move(path)) {}

  bool is_root() const { return path_.empty(); }
  std::size_t length() const { return path_.size(); }
  const std::vector<int>& path() const { return path_; }
  auto begin() const { return path_.begin(); }
  auto end() const { return path_.end(); }
  int operator[](std::size_t i) const { return path_[i]; }

  Position child(int i) const {
    Position p = *this;
    p.path_.push_back(i);
    return p;
  }
  Position concat(const Position& q) const {
    Position p = *this;
    p.path_.insert(p.path_.end(), q.path_.begin(), q.path_.end());
    return p;
  }
  bool is_prefix_of(const Position& q) const {
    return path_.size() <= q.path_.size() && std::equal(path_.begin(), path_.end(), q.path_.begin());
  }
  /// Neither position lies above the other.
  bool parallel_to(const Position& q) const { return !is_prefix_of(q) && !q.is_prefix_of(*this); }

  std::string to_string() const {
    if (path_.empty()) return "ε";
    std::string s;
    for (std::size_t i = 0; i < path_.size(); ++i) {
      if (i) s += '.';
      s += std::to_string(path_[i]);
    }
    return s;
  }

  friend auto operator<=>(const Position&, const Position&) = default;
  friend bool operator==(const Position&, const Position&) = default;

 private:
  std::vector<int> path_;
};

/// Finite map from variable names to terms. Bindings x ↦ x are never stored.
class Substitution {
 public:
  Substitution() = default;
  Substitution(std::initializer_list<std::pair<const std::string, Term>> init) {
    for (const auto& [x, t] : init) bind(x, t);
  }

  void bind(const std::string& x, const Term& t) {
    if (t.is_var() && t.name() == x) {
      map_.erase(x);
      return;
    }
    map_.insert_or_assign(x, t);
  }
  const Term* find(const std::string& x) const {
    auto it = map_.find(x);
    return it == map_.end() ? nullptr : &it->second;
  }
  bool contains(const std::string& x) const { return map_.contains(x); }
  std::size_t size() const { return map_.size(); }
  bool empty() const { return map_.empty(); }
  auto begin() const { return map_.begin(); }
  auto end() const { return map_.end(); }

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  std::map<std::string, Term> map_;
};

// ---------------------------------------------------------------------------
// Printing

inline void print_term_to(std::string& out, const Term& t) {
  out += t.name();
  if (t.is_var() || t.arity() == 0) return;
  out += '(';
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i) out += ',';
    print_term_to(out, t.arg(i));
  }
  out += ')';
}

inline std::string to_string(const Term& t) {
  std::string s;
  print_term_to(s, t);
  return s;
}

inline std::string to_string(const Substitution& sigma) {
  std::string s = "{";
  bool first = true;
  for (const auto& [x, t] : sigma) {
    if (!first) s += ", ";
    first = false;
    s += x + " ↦ " + to_string(t);
  }
  return s + "}";
}

// ---------------------------------------------------------------------------
// Positions and subterms

inline bool is_valid_position(const Term& t, const Position& p) {
  const Term* cur = &t;
  for (int i : p) {
    if (i < 1 || static_cast<std::size_t>(i) > cur->arity()) return false;
    cur = &cur->arg(static_cast<std::size_t>(i) - 1);
  }
  return true;
}

inline const Term& subterm_at(const Term& t, const Position& p) {
  const Term* cur = &t;
  for (int i : p) {
    if (i < 1 || static_cast<std::size_t>(i) > cur->arity())
      throw Error("invalid-position", "position " + p.to_string() + " is not valid in " + to_string(t));
    cur = &cur->arg(static_cast<std::size_t>(i) - 1);
  }
  return *cur;
}

namespace detail {
inline Term replace_from(const Term& t, const Position& p, std::size_t depth, const Term& u) {
  if (depth == p.length()) return u;
  int i = p[depth];
  std::vector<Term> args = t.args();
  args[static_cast<std::size_t>(i) - 1] = replace_from(t.arg(static_cast<std::size_t>(i) - 1), p, depth + 1, u);
  return Term::app(t.name(), std::move(args));
}
}  // namespace detail

inline Term replace_at(const Term& t, const Position& p, const Term& u) {
  if (!is_valid_position(t, p))
    throw Error("invalid-position", "position " + p.to_string() + " is not valid in " + to_string(t));
  return detail::replace_from(t, p, 0, u);
}

namespace detail {
inline void collect_fun_positions(const Term& t, Position& cur, std::vector<Position>& out) {
  if (t.is_var()) return;
  out.push_back(cur);
  for (std::size_t i = 0; i < t.arity(); ++i) {
    Position next = cur.child(static_cast<int>(i) + 1);
    collect_fun_positions(t.arg(i), next, out);
  }
}
inline void collect_positions(const Term& t, const Position& cur, std::vector<Position>& out) {
  out.push_back(cur);
  for (std::size_t i = 0; i < t.arity(); ++i) collect_positions(t.arg(i), cur.child(static_cast<int>(i) + 1), out);
}
}  // namespace detail

/// Positions of function-symbol nodes in left-to-right preorder.
inline std::vector<Position> fun_positions(const Term& t) {
  std::vector<Position> out;
  Position root;
  detail::collect_fun_positions(t, root, out);
  return out;
}

/// All positions in left-to-right preorder.
inline std::vector<Position> positions(const Term& t) {
  std::vector<Position> out;
  detail::collect_positions(t, Position{}, out);
  return out;
}

// ---------------------------------------------------------------------------
// Variables

namespace detail {
inline void collect_vars(const Term& t, std::vector<std::string>& out, std::set<std::string>& seen) {
  if (t.is_var()) {
    if (seen.insert(t.name()).second) out.push_back(t.name());
    return;
  }
  for (const auto& a : t.args()) collect_vars(a, out, seen);
}
}  // namespace detail

/// Variables of `t` in order of first occurrence.
inline std::vector<std::string> variables(const Term& t) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  detail::collect_vars(t, out, seen);
  return out;
}

inline std::set<std::string> variable_set(const Term& t) {
  auto v = variables(t);
  return {v.begin(), v.end()};
}

inline bool occurs(const std::string& x, const Term& t) {
  if (t.is_var()) return t.name() == x;
  return std::any_of(t.args().begin(), t.args().end(), [&](const Term& a) { return occurs(x, a); });
}

inline bool is_ground(const Term& t) {
  if (t.is_var()) return false;
  return std::all_of(t.args().begin(), t.args().end(), is_ground);
}

inline void count_vars(const Term& t, std::map<std::string, long>& counts, long factor = 1) {
  if (t.is_var()) {
    counts[t.name()] += factor;
    return;
  }
  for (const auto& a : t.args()) count_vars(a, counts, factor);
}

/// No variable occurs twice.
inline bool is_linear(const Term& t) {
  std::map<std::string, long> counts;
  count_vars(t, counts);
  return std::all_of(counts.begin(), counts.end(), [](const auto& kv) { return kv.second == 1; });
}

// ---------------------------------------------------------------------------
// Substitution, matching, unification

inline Term apply_subst(const Term& t, const Substitution& sigma) {
  if (sigma.empty()) return t;
  if (t.is_var()) {
    const Term* b = sigma.find(t.name());
    return b ? *b : t;
  }
  if (t.arity() == 0) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  bool changed = false;
  for (const auto& a : t.args()) {
    args.push_back(apply_subst(a, sigma));
    changed = changed || !(args.back() == a);
  }
  return changed ? Term::app(t.name(), std::move(args)) : t;
}

namespace detail {
// Matching with an explicit record of identity bindings, which Substitution
// does not store.
inline bool match_full(const Term& pattern, const Term& subject, std::map<std::string, Term>& binding) {
  if (pattern.is_var()) {
    auto [it, inserted] = binding.try_emplace(pattern.name(), subject);
    return inserted || it->second == subject;
  }
  if (subject.is_var() || pattern.name() != subject.name() || pattern.arity() != subject.arity()) return false;
  for (std::size_t i = 0; i < pattern.arity(); ++i)
    if (!match_full(pattern.arg(i), subject.arg(i), binding)) return false;
  return true;
}
}  // namespace detail

/// σ with patternσ = subject, if one exists.
inline std::optional<Substitution> match(const Term& pattern, const Term& subject) {
  std::map<std::string, Term> binding;
  if (!detail::match_full(pattern, subject, binding)) return std::nullopt;
  Substitution sigma;
  for (const auto& [x, t] : binding) sigma.bind(x, t);
  return sigma;
}

/// Most general unifier (Martelli-Montanari transformation with occurs
/// check). The result is idempotent.
inline std::optional<Substitution> unify(const Term& s, const Term& t) {
  Substitution sigma;
  std::vector<std::pair<Term, Term>> work{{s, t}};
  while (!work.empty()) {
    auto [a0, b0] = work.back();
    work.pop_back();
    Term a = apply_subst(a0, sigma);
    Term b = apply_subst(b0, sigma);
    if (a == b) continue;
    if (!a.is_var() && b.is_var()) std::swap(a, b);
    if (a.is_var()) {
      if (occurs(a.name(), b)) return std::nullopt;
      Substitution single{{a.name(), b}};
      Substitution next;
      for (const auto& [x, u] : sigma) next.bind(x, apply_subst(u, single));
      next.bind(a.name(), b);
      sigma = std::move(next);
      continue;
    }
    if (a.name() != b.name() || a.arity() != b.arity()) return std::nullopt;
    for (std::size_t i = a.arity(); i-- > 0;) work.emplace_back(a.arg(i), b.arg(i));
  }
  return sigma;
}

/// σ;τ: apply σ first, then τ.
inline Substitution compose(const Substitution& sigma, const Substitution& tau) {
  Substitution out;
  for (const auto& [x, t] : sigma) out.bind(x, apply_subst(t, tau));
  for (const auto& [x, t] : tau)
    if (!sigma.contains(x)) out.bind(x, t);
  return out;
}

// ---------------------------------------------------------------------------
// Equations, rules, systems

struct Equation {
  Term lhs;
  Term rhs;
  friend bool operator==(const Equation&, const Equation&) = default;
};

struct Rule {
  Term lhs;
  Term rhs;
  std::string id;  // optional user-supplied name; empty when unnamed

  friend bool operator==(const Rule& a, const Rule& b) { return a.lhs == b.lhs && a.rhs == b.rhs && a.id == b.id; }
};

inline std::string to_string(const Rule& r) { return to_string(r.lhs) + " -> " + to_string(r.rhs); }
inline std::string to_string(const Equation& e) { return to_string(e.lhs) + " == " + to_string(e.rhs); }

/// Throws invalid-rule when `lhs` is a variable or `rhs` has extra variables.
inline void validate_rule(const Rule& r, const std::string& label) {
  if (r.lhs.is_var())
    throw Error("invalid-rule", "rule " + label + " (" + to_string(r) + ") has a variable left-hand side");
  auto lv = variable_set(r.lhs);
  for (const auto& x : variables(r.rhs))
    if (!lv.contains(x))
      throw Error("invalid-rule",
                  "rule " + label + " (" + to_string(r) + ") has variable " + x + " on the right but not on the left");
}

namespace detail {
inline void collect_symbols(const Term& t, std::vector<Symbol>& sig, std::map<std::string, std::size_t>& arity,
                            const std::string& where) {
  if (t.is_var()) return;
  auto [it, inserted] = arity.try_emplace(t.name(), t.arity());
  if (inserted)
    sig.push_back(t.symbol());
  else if (it->second != t.arity())
    throw Error("arity-mismatch", "symbol " + t.name() + " used with arity " + std::to_string(t.arity()) +
                                      " and " + std::to_string(it->second) + " (" + where + ")");
  for (const auto& a : t.args()) collect_symbols(a, sig, arity, where);
}
}  // namespace detail

/// A finite rule list plus its signature (symbols in order of first
/// occurrence, optionally extended by extra symbols).
class Trs {
 public:
  Trs() = default;
  explicit Trs(std::vector<Rule> rules, const std::vector<Symbol>& extra = {}) : rules_(std::move(rules)) {
    std::map<std::string, std::size_t> arity;
    std::set<std::string> ids;
    for (const auto& r : rules_)
      if (!r.id.empty() && !ids.insert(r.id).second)
        throw Error("duplicate-rule-id", "rule id " + r.id + " is used twice");
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      const Rule& r = rules_[i];
      std::string label = r.id;
      if (label.empty()) {
        label = "r" + std::to_string(i + 1);
        while (ids.contains(label)) label += "'";
        ids.insert(label);
      }
      labels_.push_back(label);
      validate_rule(r, label);
      detail::collect_symbols(r.lhs, signature_, arity, "rule " + label);
      detail::collect_symbols(r.rhs, signature_, arity, "rule " + label);
    }
    for (const auto& s : extra) {
      auto [it, inserted] = arity.try_emplace(s.name, s.arity);
      if (inserted)
        signature_.push_back(s);
      else if (it->second != s.arity)
        throw Error("arity-mismatch", "symbol " + s.name + " used with arity " + std::to_string(s.arity) + " and " +
                                          std::to_string(it->second));
    }
  }

  const std::vector<Rule>& rules() const { return rules_; }
  const std::vector<Symbol>& signature() const { return signature_; }
  std::size_t size() const { return rules_.size(); }
  bool empty() const { return rules_.empty(); }
  const Rule& operator[](std::size_t i) const { return rules_[i]; }

  /// Rule id, or a generated "rN" for unnamed rules.
  const std::string& label(std::size_t i) const { return labels_[i]; }

  std::optional<std::size_t> index_of(const std::string& label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == label) return i;
    return std::nullopt;
  }

  std::optional<std::size_t> arity_of(const std::string& name) const {
    for (const auto& s : signature_)
      if (s.name == name) return s.arity;
    return std::nullopt;
  }

 private:
  std::vector<Rule> rules_;
  std::vector<std::string> labels_;
  std::vector<Symbol> signature_;
};

// ---------------------------------------------------------------------------
// Renaming

namespace detail {
inline std::atomic<unsigned long>& fresh_counter() {
  static std::atomic<unsigned long> counter{0};
  return counter;
}
inline std::string base_name(const std::string& x) {
  auto pos = x.find('\'');
  return pos == std::string::npos ? x : x.substr(0, pos);
}
}  // namespace detail

/// A variable renaming with globally fresh names of the form `x'N`.
inline Substitution fresh_renaming(const std::vector<std::string>& vars) {
  Substitution s;
  for (const auto& x : vars) {
    unsigned long n = ++detail::fresh_counter();
    s.bind(x, Term::var(detail::base_name(x) + "'" + std::to_string(n)));
  }
  return s;
}

inline Rule rename(const Rule& r, const Substitution& renaming) {
  return Rule{apply_subst(r.lhs, renaming), apply_subst(r.rhs, renaming), r.id};
}

inline Rule rename_fresh(const Rule& r) { return rename(r, fresh_renaming(variables(r.lhs))); }

/// Variants of both rules with disjoint, globally fresh variables.
inline std::pair<Rule, Rule> rename_apart(const Rule& r1, const Rule& r2) {
  return {rename_fresh(r1), rename_fresh(r2)};
}

/// Renames the variables of a group of terms back to short names: each
/// fresh `x'N` becomes `x` when no other variable of the group shares the
/// base name, otherwise `x1`, `x2`, ... in order of first occurrence.
inline std::vector<Term> tidy_variables(const std::vector<Term>& terms) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  for (const auto& t : terms) detail::collect_vars(t, order, seen);
  std::map<std::string, int> base_count;
  for (const auto& x : order) ++base_count[detail::base_name(x)];
  std::map<std::string, int> next_index;
  std::set<std::string> taken;
  Substitution renaming;
  for (const auto& x : order) {
    std::string base = detail::base_name(x);
    std::string name;
    if (base_count[base] == 1 && !taken.contains(base)) {
      name = base;
    } else {
      do name = base + std::to_string(++next_index[base]);
      while (taken.contains(name) || (seen.contains(name) && name != x));
    }
    taken.insert(name);
    renaming.bind(x, Term::var(name));
  }
  std::vector<Term> out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back(apply_subst(t, renaming));
  return out;
}

/// s and t are equal up to a bijective renaming of variables.
inline bool is_variant(const Term& s, const Term& t) {
  auto a = match(s, t);
  if (!a) return false;
  auto b = match(t, s);
  return b.has_value();
}

inline bool is_variant(const Rule& a, const Rule& b) {
  Term pa = Term::app("→", {a.lhs, a.rhs});
  Term pb = Term::app("→", {b.lhs, b.rhs});
  return is_variant(pa, pb);
}

inline bool is_variant(const Equation& a, const Equation& b) {
  Term pa = Term::app("≈", {a.lhs, a.rhs});
  Term pb = Term::app("≈", {b.lhs, b.rhs});
  Term pb_flipped = Term::app("≈", {b.rhs, b.lhs});
  return is_variant(pa, pb) || is_variant(pa, pb_flipped);
}

/// s contains an instance of t at some position; strictly when that
/// position is not the root or t is not a variant of s.
inline bool encompasses(const Term& s, const Term& t, bool strictly) {
  for (const auto& p : positions(s)) {
    if (!match(t, subterm_at(s, p))) continue;
    if (!strictly || !p.is_root() || !is_variant(s, t)) return true;
  }
  return false;
}

}  // namespace trs
