#pragma once

// Knuth-Bendix completion as an inference system over (E, R) with full
// snapshot undo, a Huet-style automatic loop, and validity by normal forms.

#include <algorithm>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "trs/critical_pairs.hpp"
#include "trs/interpretation.hpp"
#include "trs/orders.hpp"
#include "trs/rewrite.hpp"

namespace trs {

/// A reduction order used to orient equations.
class ReductionOrder {
 public:
  using Params = std::variant<LpoCertificate, KboCertificate, PolyInterpretation>;

  ReductionOrder() : params_(KboCertificate{}) {}
  explicit ReductionOrder(Params p) : params_(std::move(p)) {}

  /// KBO with every weight 1 and w0 = 1; earlier symbols of `signature` are
  /// greater.
  static ReductionOrder default_kbo(const std::vector<Symbol>& signature) {
    KboCertificate c;
    c.w0 = 1;
    std::vector<std::string> names;
    for (const auto& s : signature) {
      c.weights[s.name] = 1;
      names.push_back(s.name);
    }
    c.precedence = Precedence(names);
    return ReductionOrder(c);
  }

  static ReductionOrder default_lpo(const std::vector<Symbol>& signature) {
    std::vector<std::string> names;
    for (const auto& s : signature) names.push_back(s.name);
    return ReductionOrder(LpoCertificate{Precedence(names)});
  }

  std::string kind() const {
    switch (params_.index()) {
      case 0: return "lpo";
      case 1: return "kbo";
      default: return "poly";
    }
  }

  const Params& params() const { return params_; }

  bool gt(const Term& s, const Term& t) const {
    return std::visit(
        [&](const auto& p) -> bool {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, LpoCertificate>)
            return lpo_gt(p.precedence, s, t);
          else if constexpr (std::is_same_v<P, KboCertificate>)
            return kbo_gt(p, s, t);
          else
            return poly_decreasing(interpret(p, s), interpret(p, t));
        },
        params_);
  }

  /// Throws missing-symbol when the order does not cover `signature`, and
  /// invalid-order when a KBO is not admissible.
  void check_covers(const std::vector<Symbol>& signature) const {
    std::visit(
        [&](const auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, KboCertificate>) {
            for (const auto& s : signature) (void)p.weight_of(s.name);
            if (!kbo_admissible(p, signature)) throw Error("invalid-order", "KBO weights are not admissible");
          } else if constexpr (std::is_same_v<P, PolyInterpretation>) {
            for (const auto& s : signature) {
              auto it = p.coefficients.find(s.name);
              if (it == p.coefficients.end() || it->second.size() != s.arity + 1)
                throw Error("missing-symbol", "interpretation does not cover " + s.name);
            }
            if (!poly_monotone(p)) throw Error("invalid-order", "interpretation is not strictly monotone");
          }
        },
        params_);
  }

  friend bool operator==(const ReductionOrder&, const ReductionOrder&) = default;

 private:
  Params params_;
};

struct NumberedEquation {
  int id = 0;
  Equation eq;
  friend bool operator==(const NumberedEquation&, const NumberedEquation&) = default;
};

struct NumberedRule {
  int id = 0;
  Rule rule;
  friend bool operator==(const NumberedRule&, const NumberedRule&) = default;
};

enum class SessionStatus { Running, Success, Stuck };

inline std::string to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::Running: return "Running";
    case SessionStatus::Success: return "Success";
    case SessionStatus::Stuck: return "Stuck";
  }
  return "?";
}

/// The part of a session that undo restores.
struct CompletionSnapshot {
  std::vector<NumberedEquation> equations;
  std::vector<NumberedRule> rules;
  int next_id = 1;
  SessionStatus status = SessionStatus::Running;
  friend bool operator==(const CompletionSnapshot&, const CompletionSnapshot&) = default;
};

struct HistoryEntry {
  std::string command;
  CompletionSnapshot before;
  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

struct CompletionState {
  CompletionSnapshot current;
  ReductionOrder order;
  std::vector<HistoryEntry> history;
  std::size_t fuel = 10000;  // per normalization

  const std::vector<NumberedEquation>& equations() const { return current.equations; }
  const std::vector<NumberedRule>& rules() const { return current.rules; }
  SessionStatus status() const { return current.status; }

  /// The rules as a TRS; rule labels are "r<id>".
  Trs trs() const {
    std::vector<Rule> rs;
    for (const auto& r : current.rules) rs.push_back(Rule{r.rule.lhs, r.rule.rhs, "r" + std::to_string(r.id)});
    return Trs(rs);
  }

  friend bool operator==(const CompletionState&, const CompletionState&) = default;
};

namespace detail {

inline Term normal_form(const Term& t, const Trs& R, std::size_t fuel) {
  auto res = normalize(t, R, Strategy::LeftmostOutermost, fuel);
  if (!res.normal_form()) throw Error("fuel-exhausted", "normalizing " + to_string(t) + " ran out of fuel");
  return res.term;
}

inline SessionStatus compute_status(const CompletionSnapshot& s, const ReductionOrder& order, std::size_t fuel) {
  std::vector<Rule> rs;
  for (const auto& r : s.rules) rs.push_back(r.rule);
  Trs R(rs);
  if (s.equations.empty()) {
    for (const auto& cp : critical_pairs(R))
      if (normal_form(cp.left, R, fuel) != normal_form(cp.right, R, fuel)) return SessionStatus::Running;
    return SessionStatus::Success;
  }
  for (const auto& e : s.equations) {
    Term l = normal_form(e.eq.lhs, R, fuel);
    Term r = normal_form(e.eq.rhs, R, fuel);
    if (l == r || order.gt(l, r) || order.gt(r, l)) return SessionStatus::Running;
  }
  return SessionStatus::Stuck;
}

inline Trs rules_of(const CompletionSnapshot& s) {
  std::vector<Rule> rs;
  for (const auto& r : s.rules) rs.push_back(Rule{r.rule.lhs, r.rule.rhs, "r" + std::to_string(r.id)});
  return Trs(rs);
}

inline std::size_t find_equation(const CompletionSnapshot& s, int id) {
  for (std::size_t i = 0; i < s.equations.size(); ++i)
    if (s.equations[i].id == id) return i;
  throw Error("unknown-equation", "no equation with id " + std::to_string(id));
}

inline std::size_t find_rule(const CompletionSnapshot& s, int id) {
  for (std::size_t i = 0; i < s.rules.size(); ++i)
    if (s.rules[i].id == id) return i;
  throw Error("unknown-rule", "no rule with id " + std::to_string(id));
}

inline bool is_known(const CompletionSnapshot& s, const Equation& e) {
  for (const auto& x : s.equations)
    if (is_variant(x.eq, e)) return true;
  for (const auto& r : s.rules)
    if (is_variant(Equation{r.rule.lhs, r.rule.rhs}, e)) return true;
  return false;
}

/// Adds `e` with a fresh id unless a variant is already present.
inline bool add_equation(CompletionSnapshot& s, const Equation& e) {
  if (is_known(s, e)) return false;
  auto tidy = tidy_variables({e.lhs, e.rhs});
  s.equations.push_back(NumberedEquation{s.next_id++, Equation{tidy[0], tidy[1]}});
  return true;
}

inline CompletionState record(const CompletionState& before, CompletionSnapshot after, std::string command) {
  CompletionState out = before;
  out.history.push_back(HistoryEntry{std::move(command), before.current});
  after.status = compute_status(after, before.order, before.fuel);
  out.current = std::move(after);
  return out;
}

[[noreturn]] inline void not_applicable(const std::string& why) { throw Error("not-applicable", why); }

/// Critical pairs between two rules in both roles.
inline std::vector<CriticalPair> pairs_between(const Rule& a, const Rule& b, bool same) {
  auto out = critical_pairs_of(a, b, same);
  if (!same) {
    auto more = critical_pairs_of(b, a, false);
    out.insert(out.end(), more.begin(), more.end());
  }
  return out;
}

}  // namespace detail

inline CompletionState new_session(const std::vector<Equation>& E0, const ReductionOrder& order,
                                   std::size_t fuel = 10000) {
  CompletionState s;
  s.order = order;
  s.fuel = fuel;
  for (const auto& e : E0) s.current.equations.push_back(NumberedEquation{s.current.next_id++, e});
  s.current.status = detail::compute_status(s.current, order, fuel);
  return s;
}

enum class Direction { LeftToRight, RightToLeft };

inline Direction parse_direction(const std::string& d) {
  if (d == "LR" || d == "lr" || d == "->") return Direction::LeftToRight;
  if (d == "RL" || d == "rl" || d == "<-") return Direction::RightToLeft;
  throw Error("usage", "direction must be LR or RL, got '" + d + "'");
}

inline CompletionState orient(const CompletionState& st, int eq_id, Direction dir) {
  auto next = st.current;
  auto i = detail::find_equation(next, eq_id);
  Equation e = next.equations[i].eq;
  Term l = dir == Direction::LeftToRight ? e.lhs : e.rhs;
  Term r = dir == Direction::LeftToRight ? e.rhs : e.lhs;
  if (l.is_var()) throw Error("variable-violation", "left-hand side " + to_string(l) + " is a variable");
  auto lv = variable_set(l);
  for (const auto& x : variables(r))
    if (!lv.contains(x))
      throw Error("variable-violation", "variable " + x + " of " + to_string(r) + " does not occur in " + to_string(l));
  if (!st.order.gt(l, r))
    throw Error("not-orientable", "the " + st.order.kind() + " order does not prove " + to_string(l) + " > " + to_string(r));
  next.equations.erase(next.equations.begin() + static_cast<long>(i));
  next.rules.push_back(NumberedRule{eq_id, Rule{l, r, {}}});
  return detail::record(st, next, "orient " + std::to_string(eq_id) + (dir == Direction::LeftToRight ? " LR" : " RL"));
}

inline CompletionState deduce(const CompletionState& st, int rule1, int rule2) {
  auto next = st.current;
  const Rule& a = next.rules[detail::find_rule(next, rule1)].rule;
  const Rule& b = next.rules[detail::find_rule(next, rule2)].rule;
  auto cps = detail::pairs_between(a, b, rule1 == rule2);
  for (const auto& cp : cps) detail::add_equation(next, Equation{cp.left, cp.right});
  return detail::record(st, next, "deduce " + std::to_string(rule1) + " " + std::to_string(rule2));
}

/// One rewrite step on each reducible side, or full normalization.
inline CompletionState simplify(const CompletionState& st, int eq_id, bool full = false) {
  auto next = st.current;
  auto i = detail::find_equation(next, eq_id);
  Trs R = detail::rules_of(next);
  Equation& e = next.equations[i].eq;
  if (is_normal_form(e.lhs, R) && is_normal_form(e.rhs, R))
    detail::not_applicable("both sides of equation " + std::to_string(eq_id) + " are in normal form");
  for (Term* side : {&e.lhs, &e.rhs}) {
    if (full)
      *side = detail::normal_form(*side, R, st.fuel);
    else if (auto s = step(*side, R, Strategy::LeftmostOutermost))
      *side = s->term;
  }
  return detail::record(st, next, "simplify " + std::to_string(eq_id) + (full ? " full" : ""));
}

inline CompletionState delete_equation(const CompletionState& st, int eq_id) {
  auto next = st.current;
  auto i = detail::find_equation(next, eq_id);
  if (next.equations[i].eq.lhs != next.equations[i].eq.rhs)
    detail::not_applicable("the sides of equation " + std::to_string(eq_id) + " differ");
  next.equations.erase(next.equations.begin() + static_cast<long>(i));
  return detail::record(st, next, "delete " + std::to_string(eq_id));
}

/// Replaces the right-hand side by its normal form.
inline CompletionState compose(const CompletionState& st, int rule_id) {
  auto next = st.current;
  auto i = detail::find_rule(next, rule_id);
  Trs R = detail::rules_of(next);
  Rule& r = next.rules[i].rule;
  if (is_normal_form(r.rhs, R)) detail::not_applicable("right-hand side of rule " + std::to_string(rule_id) + " is in normal form");
  r.rhs = detail::normal_form(r.rhs, R, st.fuel);
  return detail::record(st, next, "compose " + std::to_string(rule_id));
}

namespace detail {
/// First (preorder position, rule order) redex in `lhs` by a rule other than
/// `self` whose left-hand side `lhs` strictly encompasses.
inline std::optional<Term> collapse_reduct(const CompletionSnapshot& s, std::size_t self) {
  const Term& lhs = s.rules[self].rule.lhs;
  for (const auto& p : fun_positions(lhs)) {
    const Term& sub = subterm_at(lhs, p);
    for (std::size_t j = 0; j < s.rules.size(); ++j) {
      if (j == self) continue;
      const Rule& other = s.rules[j].rule;
      auto sigma = match(other.lhs, sub);
      if (!sigma) continue;
      if (p.is_root() && is_variant(other.lhs, lhs)) continue;
      return replace_at(lhs, p, apply_subst(other.rhs, *sigma));
    }
  }
  return std::nullopt;
}
}  // namespace detail

/// Turns the rule into an equation with its left-hand side rewritten.
inline CompletionState collapse(const CompletionState& st, int rule_id) {
  auto next = st.current;
  auto i = detail::find_rule(next, rule_id);
  auto reduct = detail::collapse_reduct(next, i);
  if (!reduct)
    detail::not_applicable("left-hand side of rule " + std::to_string(rule_id) +
                           " is not reducible by another rule whose left-hand side it strictly encompasses");
  Term rhs = next.rules[i].rule.rhs;
  next.rules.erase(next.rules.begin() + static_cast<long>(i));
  next.equations.push_back(NumberedEquation{rule_id, Equation{*reduct, rhs}});
  return detail::record(st, next, "collapse " + std::to_string(rule_id));
}

inline CompletionState undo(const CompletionState& st) {
  if (st.history.empty()) throw Error("empty-history", "nothing to undo");
  CompletionState out = st;
  out.current = out.history.back().before;
  out.history.pop_back();
  return out;
}

/// One macro step of the automatic loop: take the smallest equation (size,
/// then id), normalize it, delete or orient it, then collapse and compose
/// the other rules and deduce against every rule. With no equations left,
/// every critical pair whose normal forms differ is added instead.
inline CompletionState auto_step(const CompletionState& st) {
  if (st.current.status == SessionStatus::Success) detail::not_applicable("the session is already complete");
  auto next = st.current;
  if (next.equations.empty()) {
    Trs R = detail::rules_of(next);
    for (const auto& cp : critical_pairs(R)) {
      Term l = detail::normal_form(cp.left, R, st.fuel);
      Term r = detail::normal_form(cp.right, R, st.fuel);
      if (l != r) detail::add_equation(next, Equation{l, r});
    }
    return detail::record(st, next, "auto_step");
  }
  auto pick = std::min_element(next.equations.begin(), next.equations.end(), [](const auto& a, const auto& b) {
    std::size_t sa = a.eq.lhs.size() + a.eq.rhs.size();
    std::size_t sb = b.eq.lhs.size() + b.eq.rhs.size();
    return sa != sb ? sa < sb : a.id < b.id;
  });
  NumberedEquation chosen = *pick;
  next.equations.erase(pick);
  Trs R = detail::rules_of(next);
  Term s = detail::normal_form(chosen.eq.lhs, R, st.fuel);
  Term t = detail::normal_form(chosen.eq.rhs, R, st.fuel);
  if (s == t) return detail::record(st, next, "auto_step");
  if (!st.order.gt(s, t) && !st.order.gt(t, s))
    throw Error("not-orientable", "equation " + std::to_string(chosen.id) + " normalizes to " + to_string(s) +
                                      " == " + to_string(t) + ", which the " + st.order.kind() +
                                      " order orients in neither direction");
  auto tidy = st.order.gt(s, t) ? tidy_variables({s, t}) : tidy_variables({t, s});
  Rule rule{tidy[0], tidy[1], {}};
  Trs single({rule});
  std::vector<NumberedRule> kept;
  for (auto& r : next.rules) {
    if (!is_normal_form(r.rule.lhs, single)) {
      auto red = step(r.rule.lhs, single, Strategy::LeftmostOutermost);
      next.equations.push_back(NumberedEquation{r.id, Equation{red->term, r.rule.rhs}});
      continue;
    }
    kept.push_back(r);
  }
  next.rules = kept;
  next.rules.push_back(NumberedRule{chosen.id, rule});
  Trs all = detail::rules_of(next);
  for (auto& r : next.rules)
    if (!is_normal_form(r.rule.rhs, all)) r.rule.rhs = detail::normal_form(r.rule.rhs, all, st.fuel);
  const Rule& added = next.rules.back().rule;
  std::vector<Rule> current;
  for (const auto& r : next.rules) current.push_back(r.rule);
  for (std::size_t j = 0; j < current.size(); ++j)
    for (const auto& cp : detail::pairs_between(added, current[j], j + 1 == current.size()))
      if (cp.left != cp.right) detail::add_equation(next, Equation{cp.left, cp.right});
  return detail::record(st, next, "auto_step");
}

struct CompletionResult {
  enum class Outcome { Completed, Failed, FuelExhausted };
  Outcome outcome = Outcome::FuelExhausted;
  CompletionState state;
  std::string reason;
};

inline std::string to_string(CompletionResult::Outcome o) {
  switch (o) {
    case CompletionResult::Outcome::Completed: return "Completed";
    case CompletionResult::Outcome::Failed: return "Failed";
    case CompletionResult::Outcome::FuelExhausted: return "FuelExhausted";
  }
  return "?";
}

/// Runs auto_step at most `fuel` times.
inline CompletionResult auto_complete(const CompletionState& start, std::size_t fuel = 10000,
                                      const Deadline& deadline = {}) {
  CompletionResult res{CompletionResult::Outcome::FuelExhausted, start, {}};
  for (std::size_t i = 0; i < fuel; ++i) {
    if (res.state.status() == SessionStatus::Success) break;
    check_deadline(deadline);
    try {
      res.state = auto_step(res.state);
    } catch (const Error& e) {
      if (e.code() != "not-orientable" && e.code() != "fuel-exhausted") throw;
      res.outcome = CompletionResult::Outcome::Failed;
      res.reason = e.what();
      return res;
    }
  }
  if (res.state.status() == SessionStatus::Success) res.outcome = CompletionResult::Outcome::Completed;
  return res;
}

inline CompletionResult auto_complete(const std::vector<Equation>& E0, const ReductionOrder& order,
                                      std::size_t fuel = 10000, const Deadline& deadline = {}) {
  return auto_complete(new_session(E0, order), fuel, deadline);
}

struct Validity {
  bool valid = false;
  Term left_nf;
  Term right_nf;
};

/// s ↔*E t iff both have the same normal form under the completed R.
inline Validity decide_validity(const Trs& R, const Term& s, const Term& t, std::size_t fuel = 100000) {
  Term a = detail::normal_form(s, R, fuel);
  Term b = detail::normal_form(t, R, fuel);
  return Validity{a == b, a, b};
}

/// Applies a command by name; `args` are the integer arguments and
/// `direction` the orientation for orient.
inline CompletionState apply_command(const CompletionState& st, const std::string& kind, const std::vector<int>& args,
                                     const std::string& direction = "LR", bool full = false) {
  auto need = [&](std::size_t n) {
    if (args.size() != n)
      throw Error("usage", kind + " expects " + std::to_string(n) + " argument" + (n == 1 ? "" : "s"));
  };
  if (kind == "orient") {
    need(1);
    return orient(st, args[0], parse_direction(direction));
  }
  if (kind == "deduce") {
    need(2);
    return deduce(st, args[0], args[1]);
  }
  if (kind == "simplify") {
    need(1);
    return simplify(st, args[0], full);
  }
  if (kind == "delete") {
    need(1);
    return delete_equation(st, args[0]);
  }
  if (kind == "compose") {
    need(1);
    return compose(st, args[0]);
  }
  if (kind == "collapse") {
    need(1);
    return collapse(st, args[0]);
  }
  if (kind == "auto_step") {
    need(0);
    return auto_step(st);
  }
  if (kind == "undo") {
    need(0);
    return undo(st);
  }
  throw Error("usage", "unknown command '" + kind + "'");
}

}  // namespace trs
