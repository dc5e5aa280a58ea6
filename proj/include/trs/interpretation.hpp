#pragma once

// Linear polynomial and matrix interpretations over the naturals: checking
// by absolute positiveness, and bounded backtracking search with
// per-rule pruning.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "trs/budget.hpp"
#include "trs/orders.hpp"
#include "trs/term.hpp"

namespace trs {

/// c0 + c1*x1 + ... + cn*xn per symbol; coefficients[f] = {c0, c1, ..., cn}.
struct PolyInterpretation {
  std::map<std::string, std::vector<long>> coefficients;
  friend bool operator==(const PolyInterpretation&, const PolyInterpretation&) = default;
};

/// Linear polynomial over named variables.
struct LinearPoly {
  long constant = 0;
  std::map<std::string, long> coeff;
};

inline LinearPoly interpret(const PolyInterpretation& I, const Term& t) {
  if (t.is_var()) return LinearPoly{0, {{t.name(), 1}}};
  auto it = I.coefficients.find(t.name());
  if (it == I.coefficients.end() || it->second.size() != t.arity() + 1)
    throw Error("missing-symbol", "interpretation does not cover " + t.name() + "/" + std::to_string(t.arity()));
  const auto& c = it->second;
  LinearPoly out{c[0], {}};
  for (std::size_t i = 0; i < t.arity(); ++i) {
    LinearPoly a = interpret(I, t.arg(i));
    out.constant += c[i + 1] * a.constant;
    for (const auto& [x, k] : a.coeff) out.coeff[x] += c[i + 1] * k;
  }
  return out;
}

/// Renders with variables in `order` first, e.g. "16*x + 5".
inline std::string to_string(const LinearPoly& p, const std::vector<std::string>& order = {}) {
  std::vector<std::string> vars = order;
  for (const auto& [x, k] : p.coeff)
    if (std::find(vars.begin(), vars.end(), x) == vars.end()) vars.push_back(x);
  std::string s;
  for (const auto& x : vars) {
    auto it = p.coeff.find(x);
    if (it == p.coeff.end() || it->second == 0) continue;
    if (!s.empty()) s += " + ";
    s += it->second == 1 ? x : std::to_string(it->second) + "*" + x;
  }
  if (p.constant != 0 || s.empty()) s += (s.empty() ? "" : " + ") + std::to_string(p.constant);
  return s;
}

/// The polynomial interpretation of f as text, e.g. "b(x1) = 4*x1 + 1".
inline std::string describe(const PolyInterpretation& I, const std::string& f) {
  const auto& c = I.coefficients.at(f);
  LinearPoly p{c[0], {}};
  std::vector<std::string> order;
  std::string head = f;
  if (c.size() > 1) head += "(";
  for (std::size_t i = 1; i < c.size(); ++i) {
    std::string x = "x" + std::to_string(i);
    p.coeff[x] = c[i];
    order.push_back(x);
    head += (i > 1 ? "," : "") + x;
  }
  if (c.size() > 1) head += ")";
  return head + " = " + to_string(p, order);
}

struct RuleEvidence {
  std::string rule;
  std::string lhs;
  std::string rhs;
  std::string evidence;
  bool holds = false;
};

/// lhs - rhs has non-negative variable coefficients and a positive constant.
inline bool poly_decreasing(const LinearPoly& l, const LinearPoly& r) {
  if (l.constant < r.constant + 1) return false;
  for (const auto& [x, k] : r.coeff) {
    auto it = l.coeff.find(x);
    if ((it == l.coeff.end() ? 0 : it->second) < k) return false;
  }
  return true;
}

inline bool poly_monotone(const PolyInterpretation& I) {
  for (const auto& [f, c] : I.coefficients) {
    if (c.empty() || c[0] < 0) return false;
    for (std::size_t i = 1; i < c.size(); ++i)
      if (c[i] < 1) return false;
  }
  return true;
}

inline RuleEvidence poly_evidence(const PolyInterpretation& I, const Rule& r, const std::string& label) {
  LinearPoly l = interpret(I, r.lhs);
  LinearPoly rr = interpret(I, r.rhs);
  auto order = variables(r.lhs);
  bool ok = poly_decreasing(l, rr);
  return RuleEvidence{label, to_string(r.lhs), to_string(r.rhs),
                      to_string(l, order) + (ok ? " > " : " ≯ ") + to_string(rr, order), ok};
}

/// Every rule strictly decreases under I, checked by absolute positiveness.
/// Throws missing-symbol when I does not cover a symbol of R.
inline bool check_poly(const PolyInterpretation& I, const Trs& R) {
  for (const auto& s : R.signature()) {
    auto it = I.coefficients.find(s.name);
    if (it == I.coefficients.end() || it->second.size() != s.arity + 1)
      throw Error("missing-symbol", "interpretation does not cover " + s.name + "/" + std::to_string(s.arity));
  }
  if (!poly_monotone(I)) return false;
  for (const auto& r : R.rules())
    if (!poly_decreasing(interpret(I, r.lhs), interpret(I, r.rhs))) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Templates: "b = 4*x1 + _; w = x1 + _"

/// Partially fixed coefficients: holes are nullopt. Unmentioned coefficients
/// are fixed to 0.
struct CoefficientTemplate {
  std::map<std::string, std::vector<std::optional<long>>> symbols;
  bool empty() const { return symbols.empty(); }
};

inline CoefficientTemplate parse_coefficient_template(const std::string& text, const std::vector<Symbol>& signature) {
  CoefficientTemplate out;
  auto trim = [](std::string s) {
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t") + 1);
    return s;
  };
  std::size_t start = 0;
  while (start <= text.size()) {
    auto semi = text.find(';', start);
    std::string item = trim(text.substr(start, semi == std::string::npos ? std::string::npos : semi - start));
    start = semi == std::string::npos ? text.size() + 1 : semi + 1;
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw Error("usage", "template item '" + item + "' lacks '='");
    std::string f = trim(item.substr(0, eq));
    auto sym = std::find_if(signature.begin(), signature.end(), [&](const Symbol& s) { return s.name == f; });
    if (sym == signature.end()) throw Error("unknown-symbol", "template mentions " + f + ", which is not in the signature");
    std::vector<std::optional<long>> coeffs(sym->arity + 1, 0L);
    std::string rhs = item.substr(eq + 1);
    std::size_t p = 0;
    while (p <= rhs.size()) {
      auto plus = rhs.find('+', p);
      std::string term = trim(rhs.substr(p, plus == std::string::npos ? std::string::npos : plus - p));
      p = plus == std::string::npos ? rhs.size() + 1 : plus + 1;
      if (term.empty()) throw Error("usage", "empty summand in template for " + f);
      std::optional<long> value;
      std::size_t index = 0;
      auto x = term.find('x');
      std::string coef = trim(x == std::string::npos ? term : term.substr(0, x));
      if (!coef.empty() && coef.back() == '*') coef = trim(coef.substr(0, coef.size() - 1));
      if (x != std::string::npos) {
        std::string idx = term.substr(x + 1);
        if (idx.empty() || !std::all_of(idx.begin(), idx.end(), ::isdigit))
          throw Error("usage", "bad variable '" + term.substr(x) + "' in template for " + f);
        index = std::stoul(idx);
        if (index < 1 || index > sym->arity)
          throw Error("usage", "variable x" + idx + " out of range for " + f + "/" + std::to_string(sym->arity));
      }
      if (coef == "_") {
        value = std::nullopt;
      } else if (coef.empty()) {
        if (x == std::string::npos) throw Error("usage", "empty summand in template for " + f);
        value = 1;
      } else {
        if (!std::all_of(coef.begin(), coef.end(), ::isdigit))
          throw Error("usage", "bad coefficient '" + coef + "' in template for " + f);
        value = std::stol(coef);
      }
      coeffs[index] = value;
    }
    out.symbols[f] = coeffs;
  }
  for (const auto& [f, c] : out.symbols)
    for (std::size_t i = 1; i < c.size(); ++i)
      if (c[i] && *c[i] < 1)
        throw Error("usage", "template for " + f + " gives x" + std::to_string(i) +
                                 " coefficient 0; interpretations must be strictly monotone");
  return out;
}

// ---------------------------------------------------------------------------
// Matrix interpretations

using Vec = std::vector<long>;
using Mat = std::vector<std::vector<long>>;

struct MatrixSymbol {
  std::vector<Mat> args;
  Vec constant;
  friend bool operator==(const MatrixSymbol&, const MatrixSymbol&) = default;
};

struct MatrixInterpretation {
  std::size_t dim = 1;
  std::map<std::string, MatrixSymbol> symbols;
  friend bool operator==(const MatrixInterpretation&, const MatrixInterpretation&) = default;
};

struct LinearForm {
  Vec constant;
  std::map<std::string, Mat> coeff;
};

namespace detail {
inline Mat identity(std::size_t d) {
  Mat m(d, Vec(d, 0));
  for (std::size_t i = 0; i < d; ++i) m[i][i] = 1;
  return m;
}
inline Mat mul(const Mat& a, const Mat& b) {
  std::size_t d = a.size();
  Mat c(d, Vec(d, 0));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k)
      if (a[i][k])
        for (std::size_t j = 0; j < d; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}
inline Vec mul(const Mat& a, const Vec& v) {
  Vec out(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += a[i][j] * v[j];
  return out;
}
inline void add_into(Mat& a, const Mat& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) a[i][j] += b[i][j];
}
inline std::string vec_string(const Vec& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "]";
}
inline std::string mat_string(const Mat& m) {
  std::string s = "[";
  for (std::size_t i = 0; i < m.size(); ++i) s += (i ? "," : "") + vec_string(m[i]);
  return s + "]";
}
}  // namespace detail

inline LinearForm interpret(const MatrixInterpretation& I, const Term& t) {
  if (t.is_var()) return LinearForm{Vec(I.dim, 0), {{t.name(), detail::identity(I.dim)}}};
  auto it = I.symbols.find(t.name());
  if (it == I.symbols.end() || it->second.args.size() != t.arity())
    throw Error("missing-symbol", "interpretation does not cover " + t.name() + "/" + std::to_string(t.arity()));
  const auto& sym = it->second;
  LinearForm out{sym.constant, {}};
  for (std::size_t i = 0; i < t.arity(); ++i) {
    LinearForm a = interpret(I, t.arg(i));
    Vec c = detail::mul(sym.args[i], a.constant);
    for (std::size_t k = 0; k < I.dim; ++k) out.constant[k] += c[k];
    for (const auto& [x, m] : a.coeff) {
      Mat prod = detail::mul(sym.args[i], m);
      auto [pos, inserted] = out.coeff.try_emplace(x, prod);
      if (!inserted) detail::add_into(pos->second, prod);
    }
  }
  return out;
}

/// Entry-wise ≥ on every variable matrix and the constant, strict in the
/// first constant component.
inline bool matrix_decreasing(const LinearForm& l, const LinearForm& r, std::size_t dim) {
  if (l.constant[0] <= r.constant[0]) return false;
  for (std::size_t k = 0; k < dim; ++k)
    if (l.constant[k] < r.constant[k]) return false;
  for (const auto& [x, m] : r.coeff) {
    auto it = l.coeff.find(x);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        if ((it == l.coeff.end() ? 0 : it->second[i][j]) < m[i][j]) return false;
  }
  return true;
}

inline bool matrix_monotone(const MatrixInterpretation& I) {
  for (const auto& [f, sym] : I.symbols) {
    if (sym.constant.size() != I.dim) return false;
    for (long v : sym.constant)
      if (v < 0) return false;
    for (const auto& m : sym.args) {
      if (m.size() != I.dim || m[0][0] < 1) return false;
      for (const auto& row : m)
        for (long v : row)
          if (v < 0) return false;
    }
  }
  return true;
}

inline RuleEvidence matrix_evidence(const MatrixInterpretation& I, const Rule& r, const std::string& label) {
  LinearForm l = interpret(I, r.lhs);
  LinearForm rr = interpret(I, r.rhs);
  bool ok = matrix_decreasing(l, rr, I.dim);
  auto render = [&](const LinearForm& f) {
    std::string s;
    for (const auto& x : variables(r.lhs)) {
      auto it = f.coeff.find(x);
      if (it == f.coeff.end()) continue;
      s += detail::mat_string(it->second) + "·" + x + " + ";
    }
    return s + detail::vec_string(f.constant);
  };
  return RuleEvidence{label, to_string(r.lhs), to_string(r.rhs), render(l) + (ok ? " > " : " ≯ ") + render(rr), ok};
}

inline bool check_matrix(const MatrixInterpretation& I, const Trs& R) {
  for (const auto& s : R.signature()) {
    auto it = I.symbols.find(s.name);
    if (it == I.symbols.end() || it->second.args.size() != s.arity)
      throw Error("missing-symbol", "interpretation does not cover " + s.name + "/" + std::to_string(s.arity));
  }
  if (I.dim == 0 || !matrix_monotone(I)) return false;
  for (const auto& r : R.rules())
    if (!matrix_decreasing(interpret(I, r.lhs), interpret(I, r.rhs), I.dim)) return false;
  return true;
}

inline std::string describe(const MatrixInterpretation& I, const std::string& f) {
  const auto& sym = I.symbols.at(f);
  std::string s = f;
  if (!sym.args.empty()) {
    s += "(";
    for (std::size_t i = 0; i < sym.args.size(); ++i) s += (i ? "," : "") + std::string("x") + std::to_string(i + 1);
    s += ")";
  }
  s += " = ";
  for (std::size_t i = 0; i < sym.args.size(); ++i)
    s += detail::mat_string(sym.args[i]) + "·x" + std::to_string(i + 1) + " + ";
  return s + detail::vec_string(sym.constant);
}

/// Dimension-1 matrix interpretation as a polynomial one, and back.
inline PolyInterpretation to_poly(const MatrixInterpretation& I) {
  if (I.dim != 1) throw Error("usage", "only dimension-1 matrix interpretations are polynomial");
  PolyInterpretation p;
  for (const auto& [f, sym] : I.symbols) {
    std::vector<long> c{sym.constant[0]};
    for (const auto& m : sym.args) c.push_back(m[0][0]);
    p.coefficients[f] = c;
  }
  return p;
}

inline MatrixInterpretation to_matrix(const PolyInterpretation& p) {
  MatrixInterpretation I;
  I.dim = 1;
  for (const auto& [f, c] : p.coefficients) {
    MatrixSymbol sym{{}, {c[0]}};
    for (std::size_t i = 1; i < c.size(); ++i) sym.args.push_back(Mat{{c[i]}});
    I.symbols[f] = sym;
  }
  return I;
}

// ---------------------------------------------------------------------------
// Backtracking search shared by the polynomial and matrix provers.

namespace detail {

/// One digit of a per-symbol candidate vector.
struct Digit {
  long lo;
  long hi;
};

/// Orders symbols so that rules become fully interpreted as early as
/// possible: repeatedly take the rule with fewest unassigned symbols.
inline std::vector<std::string> pruning_order(const Trs& R) {
  std::vector<std::set<std::string>> rule_syms;
  for (const auto& r : R.rules()) {
    std::set<std::string> s;
    std::vector<Symbol> sig;
    std::map<std::string, std::size_t> ar;
    collect_symbols(r.lhs, sig, ar, "");
    collect_symbols(r.rhs, sig, ar, "");
    for (const auto& x : sig) s.insert(x.name);
    rule_syms.push_back(s);
  }
  std::vector<std::string> order;
  std::set<std::string> assigned;
  std::vector<bool> done(rule_syms.size(), false);
  while (true) {
    std::size_t best = rule_syms.size();
    std::size_t best_missing = 0;
    for (std::size_t i = 0; i < rule_syms.size(); ++i) {
      if (done[i]) continue;
      std::size_t missing = 0;
      for (const auto& f : rule_syms[i]) missing += assigned.contains(f) ? 0 : 1;
      if (best == rule_syms.size() || missing < best_missing) {
        best = i;
        best_missing = missing;
      }
    }
    if (best == rule_syms.size()) break;
    done[best] = true;
    for (const auto& sym : R.signature())
      if (rule_syms[best].contains(sym.name) && assigned.insert(sym.name).second) order.push_back(sym.name);
  }
  for (const auto& sym : R.signature())
    if (assigned.insert(sym.name).second) order.push_back(sym.name);
  return order;
}

/// Depth-first search over per-symbol candidate vectors (odometer order,
/// first digit slowest). `assign` installs a vector for a symbol; `rule_ok`
/// checks one rule once all its symbols are assigned.
class CandidateSearch {
 public:
  CandidateSearch(const Trs& R, std::vector<std::string> order, std::vector<std::vector<Digit>> digits,
                  std::function<void(std::size_t, const std::vector<long>&)> assign,
                  std::function<bool(const Rule&)> rule_ok, SearchLimits limits)
      : order_(std::move(order)), digits_(std::move(digits)), assign_(std::move(assign)),
        rule_ok_(std::move(rule_ok)), limits_(std::move(limits)) {
    std::map<std::string, std::size_t> level;
    for (std::size_t i = 0; i < order_.size(); ++i) level[order_[i]] = i;
    checks_.resize(order_.size());
    for (const auto& r : R.rules()) {
      std::vector<Symbol> sig;
      std::map<std::string, std::size_t> ar;
      collect_symbols(r.lhs, sig, ar, "");
      collect_symbols(r.rhs, sig, ar, "");
      std::size_t at = 0;
      for (const auto& s : sig) at = std::max(at, level.at(s.name));
      checks_[at].push_back(&r);
    }
    rules_ = &R;
  }

  bool run() {
    if (order_.empty()) {
      for (const auto& r : rules_->rules())
        if (!rule_ok_(r)) return false;
      return true;
    }
    return descend(0);
  }

 private:
  bool descend(std::size_t level) {
    const auto& ds = digits_[level];
    std::vector<long> v;
    for (const auto& d : ds) v.push_back(d.lo);
    while (true) {
      if (++used_ > limits_.max_candidates) throw BudgetExceeded("interpretation search exceeded its candidate budget");
      if ((used_ & 4095) == 0) check_deadline(limits_.deadline);
      assign_(level, v);
      bool ok = std::all_of(checks_[level].begin(), checks_[level].end(), [&](const Rule* r) { return rule_ok_(*r); });
      if (ok && (level + 1 == order_.size() || descend(level + 1))) return true;
      std::size_t i = ds.size();
      while (true) {
        if (i == 0) return false;
        --i;
        if (v[i] < ds[i].hi) {
          ++v[i];
          break;
        }
        v[i] = ds[i].lo;
      }
    }
  }

  std::vector<std::string> order_;
  std::vector<std::vector<Digit>> digits_;
  std::function<void(std::size_t, const std::vector<long>&)> assign_;
  std::function<bool(const Rule&)> rule_ok_;
  SearchLimits limits_;
  std::vector<std::vector<const Rule*>> checks_;
  const Trs* rules_ = nullptr;
  std::size_t used_ = 0;
};

inline Digit template_digit(const CoefficientTemplate& tmpl, const std::string& f, std::size_t index, long lo, long hi) {
  auto it = tmpl.symbols.find(f);
  if (it == tmpl.symbols.end()) return Digit{lo, hi};
  const auto& c = it->second[index];
  if (!c) return Digit{lo, hi};
  return Digit{*c, *c};
}

}  // namespace detail

/// Linear interpretation with coefficients in 0..max_coeff (argument
/// coefficients ≥ 1) satisfying check_poly and the template. Candidates are
/// enumerated per symbol as (c1, ..., cn, c0). Throws BudgetExceeded when the
/// candidate budget runs out.
inline std::optional<PolyInterpretation> prove_poly(const Trs& R, long max_coeff = 5,
                                                    const CoefficientTemplate& tmpl = {}, SearchLimits limits = {}) {
  for (const auto& [f, c] : tmpl.symbols)
    if (!R.arity_of(f)) throw Error("unknown-symbol", "template mentions " + f + ", which is not in the signature");
  auto order = detail::pruning_order(R);
  std::vector<std::vector<detail::Digit>> digits;
  for (const auto& f : order) {
    std::size_t n = *R.arity_of(f);
    std::vector<detail::Digit> ds;
    for (std::size_t i = 1; i <= n; ++i) ds.push_back(detail::template_digit(tmpl, f, i, 1, max_coeff));
    ds.push_back(detail::template_digit(tmpl, f, 0, 0, max_coeff));
    digits.push_back(ds);
  }
  PolyInterpretation I;
  auto assign = [&](std::size_t level, const std::vector<long>& v) {
    std::vector<long> c{v.back()};
    c.insert(c.end(), v.begin(), v.end() - 1);
    I.coefficients[order[level]] = c;
  };
  auto rule_ok = [&](const Rule& r) { return poly_decreasing(interpret(I, r.lhs), interpret(I, r.rhs)); };
  detail::CandidateSearch search(R, order, digits, assign, rule_ok, limits);
  if (!search.run()) return std::nullopt;
  return I;
}

/// Matrix interpretation of dimension `dim` with entries in 0..bound (the
/// top-left entry of each argument matrix ≥ 1). Per symbol the candidate
/// vector is the argument matrices row-major, then the constant vector. A
/// coefficient template constrains top-left entries and the first constant
/// component.
inline std::optional<MatrixInterpretation> prove_matrix(const Trs& R, std::size_t dim, long bound,
                                                        const CoefficientTemplate& tmpl = {},
                                                        SearchLimits limits = {}) {
  if (dim < 1 || dim > 3) throw Error("usage", "matrix dimension must be 1, 2 or 3");
  for (const auto& [f, c] : tmpl.symbols)
    if (!R.arity_of(f)) throw Error("unknown-symbol", "template mentions " + f + ", which is not in the signature");
  auto order = detail::pruning_order(R);
  std::vector<std::vector<detail::Digit>> digits;
  for (const auto& f : order) {
    std::size_t n = *R.arity_of(f);
    std::vector<detail::Digit> ds;
    for (std::size_t a = 1; a <= n; ++a)
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
          ds.push_back(i == 0 && j == 0 ? detail::template_digit(tmpl, f, a, 1, bound) : detail::Digit{0, bound});
    for (std::size_t i = 0; i < dim; ++i)
      ds.push_back(i == 0 ? detail::template_digit(tmpl, f, 0, 0, bound) : detail::Digit{0, bound});
    digits.push_back(ds);
  }
  MatrixInterpretation I;
  I.dim = dim;
  auto assign = [&](std::size_t level, const std::vector<long>& v) {
    std::size_t n = *R.arity_of(order[level]);
    MatrixSymbol sym;
    std::size_t k = 0;
    for (std::size_t a = 0; a < n; ++a) {
      Mat m(dim, Vec(dim, 0));
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) m[i][j] = v[k++];
      sym.args.push_back(m);
    }
    for (std::size_t i = 0; i < dim; ++i) sym.constant.push_back(v[k++]);
    I.symbols[order[level]] = sym;
  };
  auto rule_ok = [&](const Rule& r) { return matrix_decreasing(interpret(I, r.lhs), interpret(I, r.rhs), dim); };
  detail::CandidateSearch search(R, order, digits, assign, rule_ok, limits);
  if (!search.run()) return std::nullopt;
  return I;
}

}  // namespace trs
