#pragma once

// Lexicographic path order and Knuth-Bendix order, their certificates, and
// precedence/weight search.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "trs/budget.hpp"
#include "trs/term.hpp"

namespace trs {

/// Strict order on symbol names, given as a ranking from greatest to least.
/// Symbols absent from the ranking are incomparable to everything.
class Precedence {
 public:
  Precedence() = default;
  explicit Precedence(std::vector<std::string> ranking) : ranking_(std::move(ranking)) {
    for (std::size_t i = 0; i < ranking_.size(); ++i) rank_[ranking_[i]] = i;
  }

  bool gt(const std::string& f, const std::string& g) const {
    auto a = rank_.find(f);
    auto b = rank_.find(g);
    return a != rank_.end() && b != rank_.end() && a->second < b->second;
  }
  const std::vector<std::string>& ranking() const { return ranking_; }

  /// All f > g facts implied by the ranking.
  std::vector<std::pair<std::string, std::string>> facts() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t i = 0; i < ranking_.size(); ++i)
      for (std::size_t j = i + 1; j < ranking_.size(); ++j) out.emplace_back(ranking_[i], ranking_[j]);
    return out;
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < ranking_.size(); ++i) s += (i ? " > " : "") + ranking_[i];
    return s;
  }

  friend bool operator==(const Precedence& a, const Precedence& b) { return a.ranking_ == b.ranking_; }

 private:
  std::vector<std::string> ranking_;
  std::map<std::string, std::size_t> rank_;
};

/// Parses "f > g > h, a > b" into the list of facts it states (chains are
/// split into consecutive pairs).
inline std::vector<std::pair<std::string, std::string>> parse_precedence_facts(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> facts;
  std::string chunk;
  std::stringstream ss(text);
  while (std::getline(ss, chunk, ',')) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
      auto gt = chunk.find('>', start);
      std::string part = chunk.substr(start, gt == std::string::npos ? std::string::npos : gt - start);
      part.erase(0, part.find_first_not_of(" \t"));
      part.erase(part.find_last_not_of(" \t") + 1);
      if (part.empty()) throw Error("usage", "malformed precedence '" + text + "'");
      parts.push_back(part);
      if (gt == std::string::npos) break;
      start = gt + 1;
    }
    if (parts.size() < 2) throw Error("usage", "precedence chunk '" + chunk + "' needs at least one '>'");
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) facts.emplace_back(parts[i], parts[i + 1]);
  }
  return facts;
}

// ---------------------------------------------------------------------------
// LPO

inline bool lpo_gt(const Precedence& prec, const Term& s, const Term& t);

inline bool lpo_ge(const Precedence& prec, const Term& s, const Term& t) { return s == t || lpo_gt(prec, s, t); }

inline bool lpo_gt(const Precedence& prec, const Term& s, const Term& t) {
  if (s.is_var()) return false;
  if (t.is_var()) return occurs(t.name(), s);
  for (const auto& si : s.args())
    if (lpo_ge(prec, si, t)) return true;
  auto dominates_args = [&] {
    return std::all_of(t.args().begin(), t.args().end(), [&](const Term& tj) { return lpo_gt(prec, s, tj); });
  };
  if (s.name() == t.name() && s.arity() == t.arity()) {
    std::size_t i = 0;
    while (i < s.arity() && s.arg(i) == t.arg(i)) ++i;
    if (i == s.arity()) return false;
    return lpo_gt(prec, s.arg(i), t.arg(i)) && dominates_args();
  }
  if (prec.gt(s.name(), t.name())) return dominates_args();
  return false;
}

struct LpoCertificate {
  Precedence precedence;
  friend bool operator==(const LpoCertificate&, const LpoCertificate&) = default;
};

// ---------------------------------------------------------------------------
// KBO

struct KboCertificate {
  std::map<std::string, long> weights;
  long w0 = 1;
  Precedence precedence;

  long weight_of(const std::string& f) const {
    auto it = weights.find(f);
    if (it == weights.end()) throw Error("missing-symbol", "KBO weight for symbol " + f + " is missing");
    return it->second;
  }

  friend bool operator==(const KboCertificate&, const KboCertificate&) = default;
};

inline long kbo_weight(const KboCertificate& cert, const Term& t) {
  if (t.is_var()) return cert.w0;
  long w = cert.weight_of(t.name());
  for (const auto& a : t.args()) w += kbo_weight(cert, a);
  return w;
}

/// Weight conditions on `signature`: w0 > 0, constants weigh at least w0,
/// and a unary symbol of weight 0 is greater than every other symbol.
inline bool kbo_admissible(const KboCertificate& cert, const std::vector<Symbol>& signature) {
  if (cert.w0 <= 0) return false;
  for (const auto& s : signature) {
    auto it = cert.weights.find(s.name);
    if (it == cert.weights.end() || it->second < 0) return false;
    if (s.arity == 0 && it->second < cert.w0) return false;
    if (s.arity == 1 && it->second == 0)
      for (const auto& g : signature)
        if (g.name != s.name && !cert.precedence.gt(s.name, g.name)) return false;
  }
  return true;
}

inline bool kbo_gt(const KboCertificate& cert, const Term& s, const Term& t) {
  std::map<std::string, long> vars;
  count_vars(s, vars, 1);
  count_vars(t, vars, -1);
  for (const auto& [x, n] : vars)
    if (n < 0) return false;
  long ws = kbo_weight(cert, s);
  long wt = kbo_weight(cert, t);
  if (ws != wt) return ws > wt;
  if (s.is_var()) return false;
  if (t.is_var()) {
    // s = f^n(t) with n ≥ 1
    const Term* cur = &s;
    while (cur->is_app() && cur->arity() == 1) cur = &cur->arg(0);
    return cur->is_var() && cur->name() == t.name();
  }
  if (s.name() == t.name() && s.arity() == t.arity()) {
    std::size_t i = 0;
    while (i < s.arity() && s.arg(i) == t.arg(i)) ++i;
    return i < s.arity() && kbo_gt(cert, s.arg(i), t.arg(i));
  }
  return cert.precedence.gt(s.name(), t.name());
}

// ---------------------------------------------------------------------------
// Search

struct OrderTemplate {
  std::vector<std::pair<std::string, std::string>> precedence;  // required f > g facts
  std::map<std::string, long> weights;                          // fixed KBO weights
};

struct SearchLimits {
  std::size_t max_candidates = 2'000'000;
  Deadline deadline;
};

namespace detail {
inline std::vector<std::string> sorted_names(const std::vector<Symbol>& sig) {
  std::vector<std::string> names;
  for (const auto& s : sig) names.push_back(s.name);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

inline void check_template_symbols(const OrderTemplate& tmpl, const std::vector<Symbol>& sig) {
  std::set<std::string> names;
  for (const auto& s : sig) names.insert(s.name);
  for (const auto& [f, g] : tmpl.precedence)
    for (const auto& x : {f, g})
      if (!names.contains(x)) throw Error("unknown-symbol", "template mentions " + x + ", which is not in the signature");
  for (const auto& [f, w] : tmpl.weights)
    if (!names.contains(f)) throw Error("unknown-symbol", "template mentions " + f + ", which is not in the signature");
}

inline bool respects(const Precedence& p, const OrderTemplate& tmpl) {
  return std::all_of(tmpl.precedence.begin(), tmpl.precedence.end(),
                     [&](const auto& fact) { return p.gt(fact.first, fact.second); });
}

/// Calls `visit` on every total precedence over `names` in lexicographic
/// order of the ranking until it returns true.
template <class Visit>
bool for_each_precedence(std::vector<std::string> names, const OrderTemplate& tmpl, SearchLimits& limits,
                         std::size_t& used, Visit&& visit) {
  std::sort(names.begin(), names.end());
  do {
    if (++used > limits.max_candidates) throw BudgetExceeded("precedence search exceeded its candidate budget");
    if ((used & 1023) == 0) check_deadline(limits.deadline);
    Precedence p(names);
    if (!respects(p, tmpl)) continue;
    if (visit(p)) return true;
  } while (std::next_permutation(names.begin(), names.end()));
  return false;
}
}  // namespace detail

/// Least total precedence (lexicographic in the ranking) under which LPO
/// orients every rule. Throws BudgetExceeded when the candidate budget runs out.
inline std::optional<LpoCertificate> prove_lpo(const Trs& R, const OrderTemplate& tmpl = {}, SearchLimits limits = {}) {
  detail::check_template_symbols(tmpl, R.signature());
  std::optional<LpoCertificate> found;
  std::size_t used = 0;
  detail::for_each_precedence(detail::sorted_names(R.signature()), tmpl, limits, used, [&](const Precedence& p) {
    for (const auto& r : R.rules())
      if (!lpo_gt(p, r.lhs, r.rhs)) return false;
    found = LpoCertificate{p};
    return true;
  });
  return found;
}

/// KBO search with w0 = 1. Weights per symbol are tried in the order
/// 1, 0, 2, ..., max_weight (uniform weight 1 first), symbols in signature
/// order; for each weight vector every precedence is tried.
inline std::optional<KboCertificate> prove_kbo(const Trs& R, const OrderTemplate& tmpl = {}, long max_weight = 3,
                                               SearchLimits limits = {}) {
  const auto& sig = R.signature();
  detail::check_template_symbols(tmpl, sig);
  std::vector<long> values{1, 0};
  for (long w = 2; w <= max_weight; ++w) values.push_back(w);
  std::vector<std::vector<long>> choices;
  for (const auto& s : sig) {
    if (auto it = tmpl.weights.find(s.name); it != tmpl.weights.end()) {
      choices.push_back({it->second});
      continue;
    }
    std::vector<long> c;
    for (long v : values)
      if (!(s.arity == 0 && v < 1)) c.push_back(v);
    choices.push_back(c);
  }
  std::vector<std::size_t> digit(sig.size(), 0);
  std::size_t used = 0;
  KboCertificate cert;
  cert.w0 = 1;
  while (true) {
    for (std::size_t i = 0; i < sig.size(); ++i) cert.weights[sig[i].name] = choices[i][digit[i]];
    // weight and variable conditions do not depend on the precedence
    bool weights_ok = true;
    for (const auto& r : R.rules()) {
      std::map<std::string, long> vars;
      count_vars(r.lhs, vars, 1);
      count_vars(r.rhs, vars, -1);
      bool var_ok = std::all_of(vars.begin(), vars.end(), [](const auto& kv) { return kv.second >= 0; });
      if (!var_ok || kbo_weight(cert, r.lhs) < kbo_weight(cert, r.rhs)) {
        weights_ok = false;
        break;
      }
    }
    if (++used > limits.max_candidates) throw BudgetExceeded("KBO search exceeded its candidate budget");
    if (weights_ok) {
      bool done = detail::for_each_precedence(detail::sorted_names(sig), tmpl, limits, used, [&](const Precedence& p) {
        cert.precedence = p;
        if (!kbo_admissible(cert, sig)) return false;
        for (const auto& r : R.rules())
          if (!kbo_gt(cert, r.lhs, r.rhs)) return false;
        return true;
      });
      if (done) return cert;
    }
    std::size_t i = sig.size();
    while (i > 0) {
      --i;
      if (++digit[i] < choices[i].size()) break;
      digit[i] = 0;
      if (i == 0) return std::nullopt;
    }
    if (sig.empty()) return std::nullopt;
  }
}

}  // namespace trs
