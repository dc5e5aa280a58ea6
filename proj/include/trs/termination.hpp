#pragma once

// Termination portfolio: loop detection, linear polynomial interpretations,
// LPO, KBO and matrix interpretations. Every Yes is re-verified by the
// matching checker before it is reported.

#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "trs/interpretation.hpp"
#include "trs/loop.hpp"
#include "trs/orders.hpp"

namespace trs {

enum class Verdict { Yes, No, Maybe };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "YES";
    case Verdict::No: return "NO";
    case Verdict::Maybe: return "MAYBE";
  }
  return "?";
}

using TerminationCertificate =
    std::variant<std::monostate, PolyInterpretation, MatrixInterpretation, LpoCertificate, KboCertificate>;

struct TerminationConfig {
  std::string method = "auto";  // auto | poly | matrix | lpo | kbo | loop
  long max_coeff = 5;
  std::size_t dim = 2;
  long matrix_bound = 2;
  long max_weight = 3;
  std::string poly_template;  // "b = 4*x1 + _"
  std::string precedence;     // "f > g, h > a"
  std::string weights;        // "f = 0, g = 2"
  std::size_t loop_depth = kDefaultLoopDepth;
  std::size_t loop_node_cap = 20000;
  std::size_t max_candidates = 2'000'000;
  std::size_t portfolio_matrix_candidates = 100'000;  // matrix budget inside "auto"
  Deadline deadline;
};

struct TerminationReport {
  Verdict verdict = Verdict::Maybe;
  std::string method;  // poly | matrix | lpo | kbo | loop, empty for Maybe
  TerminationCertificate certificate;
  std::optional<LoopWitness> loop;
  std::vector<RuleEvidence> evidence;
  std::vector<std::string> notes;  // one line per method tried
};

/// Parses "f = 0, g = 2".
inline std::map<std::string, long> parse_weights(const std::string& text) {
  std::map<std::string, long> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw Error("usage", "weight '" + item + "' lacks '='");
    std::string f = item.substr(0, eq);
    std::string w = item.substr(eq + 1);
    for (auto* s : {&f, &w}) {
      s->erase(0, s->find_first_not_of(" \t"));
      s->erase(s->find_last_not_of(" \t") + 1);
    }
    if (f.empty() || w.empty() || !std::all_of(w.begin(), w.end(), ::isdigit))
      throw Error("usage", "malformed weight '" + item + "'");
    out[f] = std::stol(w);
  }
  return out;
}

inline std::vector<RuleEvidence> lpo_evidence(const LpoCertificate& c, const Trs& R) {
  std::vector<RuleEvidence> out;
  for (std::size_t i = 0; i < R.size(); ++i) {
    bool ok = lpo_gt(c.precedence, R[i].lhs, R[i].rhs);
    out.push_back(RuleEvidence{R.label(i), to_string(R[i].lhs), to_string(R[i].rhs),
                               to_string(R[i].lhs) + (ok ? " >lpo " : " ≯lpo ") + to_string(R[i].rhs), ok});
  }
  return out;
}

inline std::vector<RuleEvidence> kbo_evidence(const KboCertificate& c, const Trs& R) {
  std::vector<RuleEvidence> out;
  for (std::size_t i = 0; i < R.size(); ++i) {
    bool ok = kbo_gt(c, R[i].lhs, R[i].rhs);
    long wl = kbo_weight(c, R[i].lhs);
    long wr = kbo_weight(c, R[i].rhs);
    std::string text = "weight " + std::to_string(wl) + (wl > wr ? " > " : wl == wr ? " = " : " < ") + std::to_string(wr);
    if (wl == wr) text += ok ? ", decided by precedence/lexicographic comparison" : ", not decreasing";
    out.push_back(RuleEvidence{R.label(i), to_string(R[i].lhs), to_string(R[i].rhs), text, ok});
  }
  return out;
}

inline std::vector<RuleEvidence> poly_evidence(const PolyInterpretation& I, const Trs& R) {
  std::vector<RuleEvidence> out;
  for (std::size_t i = 0; i < R.size(); ++i) out.push_back(poly_evidence(I, R[i], R.label(i)));
  return out;
}

inline std::vector<RuleEvidence> matrix_evidence(const MatrixInterpretation& I, const Trs& R) {
  std::vector<RuleEvidence> out;
  for (std::size_t i = 0; i < R.size(); ++i) out.push_back(matrix_evidence(I, R[i], R.label(i)));
  return out;
}

/// Independent re-check of a report's claim.
inline bool verify(const TerminationReport& rep, const Trs& R) {
  if (rep.verdict == Verdict::No) return rep.loop && replay_loop(*rep.loop, R);
  if (rep.verdict != Verdict::Yes) return true;
  return std::visit(
      [&](const auto& c) -> bool {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, PolyInterpretation>) {
          return check_poly(c, R);
        } else if constexpr (std::is_same_v<C, MatrixInterpretation>) {
          return check_matrix(c, R);
        } else if constexpr (std::is_same_v<C, LpoCertificate>) {
          for (const auto& r : R.rules())
            if (!lpo_gt(c.precedence, r.lhs, r.rhs)) return false;
          return true;
        } else if constexpr (std::is_same_v<C, KboCertificate>) {
          if (!kbo_admissible(c, R.signature())) return false;
          for (const auto& r : R.rules())
            if (!kbo_gt(c, r.lhs, r.rhs)) return false;
          return true;
        } else {
          return false;
        }
      },
      rep.certificate);
}

namespace detail {

inline std::optional<TerminationReport> try_method(const std::string& method, const Trs& R,
                                                   const TerminationConfig& cfg, const CoefficientTemplate& coeffs,
                                                   const OrderTemplate& order, std::vector<std::string>& notes,
                                                   bool in_portfolio) {
  SearchLimits limits{cfg.max_candidates, cfg.deadline};
  if (in_portfolio && method == "matrix") limits.max_candidates = cfg.portfolio_matrix_candidates;
  TerminationReport rep;
  rep.method = method;
  try {
    if (method == "loop") {
      auto w = find_loop(R, cfg.loop_depth, cfg.loop_node_cap, cfg.deadline);
      if (!w) {
        notes.push_back("loop: none within depth " + std::to_string(cfg.loop_depth));
        return std::nullopt;
      }
      rep.verdict = Verdict::No;
      rep.loop = *w;
    } else if (method == "poly") {
      auto I = prove_poly(R, cfg.max_coeff, coeffs, limits);
      if (!I) {
        notes.push_back("poly: no linear interpretation with coefficients ≤ " + std::to_string(cfg.max_coeff));
        return std::nullopt;
      }
      rep.verdict = Verdict::Yes;
      rep.certificate = *I;
      rep.evidence = poly_evidence(*I, R);
    } else if (method == "matrix") {
      auto I = prove_matrix(R, cfg.dim, cfg.matrix_bound, coeffs, limits);
      if (!I) {
        notes.push_back("matrix: no interpretation of dimension " + std::to_string(cfg.dim) + " with entries ≤ " +
                        std::to_string(cfg.matrix_bound));
        return std::nullopt;
      }
      rep.verdict = Verdict::Yes;
      rep.certificate = *I;
      rep.evidence = matrix_evidence(*I, R);
    } else if (method == "lpo") {
      auto c = prove_lpo(R, order, limits);
      if (!c) {
        notes.push_back("lpo: no total precedence orients every rule");
        return std::nullopt;
      }
      rep.verdict = Verdict::Yes;
      rep.certificate = *c;
      rep.evidence = lpo_evidence(*c, R);
    } else if (method == "kbo") {
      auto c = prove_kbo(R, order, cfg.max_weight, limits);
      if (!c) {
        notes.push_back("kbo: no weights ≤ " + std::to_string(cfg.max_weight) + " and precedence orient every rule");
        return std::nullopt;
      }
      rep.verdict = Verdict::Yes;
      rep.certificate = *c;
      rep.evidence = kbo_evidence(*c, R);
    } else {
      throw Error("usage", "unknown termination method '" + method + "' (expected poly, matrix, lpo, kbo, loop or auto)");
    }
  } catch (const BudgetExceeded& e) {
    notes.push_back(method + ": " + e.what());
    return std::nullopt;
  }
  if (!verify(rep, R)) {
    notes.push_back(method + ": certificate failed re-verification and was discarded");
    return std::nullopt;
  }
  rep.notes = notes;
  return rep;
}

}  // namespace detail

/// Runs the configured method, or for "auto" the portfolio
/// loop, poly, lpo, kbo, matrix, stopping at the first definite answer.
inline TerminationReport prove_termination(const Trs& R, const TerminationConfig& cfg = {}) {
  CoefficientTemplate coeffs;
  if (!cfg.poly_template.empty()) coeffs = parse_coefficient_template(cfg.poly_template, R.signature());
  OrderTemplate order;
  if (!cfg.precedence.empty()) order.precedence = parse_precedence_facts(cfg.precedence);
  if (!cfg.weights.empty()) order.weights = parse_weights(cfg.weights);
  detail::check_template_symbols(order, R.signature());

  std::vector<std::string> methods;
  if (cfg.method == "auto")
    methods = {"loop", "poly", "lpo", "kbo", "matrix"};
  else
    methods = {cfg.method};
  std::vector<std::string> notes;
  for (const auto& m : methods) {
    if (cfg.deadline.expired()) {
      notes.push_back("timeout reached");
      break;
    }
    if (auto rep = detail::try_method(m, R, cfg, coeffs, order, notes, methods.size() > 1)) return *rep;
  }
  TerminationReport rep;
  rep.notes = notes;
  return rep;
}

/// Multi-line human-readable rendering of a certificate.
inline std::string describe(const TerminationCertificate& cert) {
  return std::visit(
      [](const auto& c) -> std::string {
        using C = std::decay_t<decltype(c)>;
        std::string out;
        if constexpr (std::is_same_v<C, PolyInterpretation>) {
          for (const auto& entry : c.coefficients) out += describe(c, entry.first) + "\n";
        } else if constexpr (std::is_same_v<C, MatrixInterpretation>) {
          for (const auto& entry : c.symbols) out += describe(c, entry.first) + "\n";
        } else if constexpr (std::is_same_v<C, LpoCertificate>) {
          out += "precedence: " + c.precedence.to_string() + "\n";
        } else if constexpr (std::is_same_v<C, KboCertificate>) {
          out += "w0 = " + std::to_string(c.w0) + "\n";
          for (const auto& [f, w] : c.weights) out += "w(" + f + ") = " + std::to_string(w) + "\n";
          out += "precedence: " + c.precedence.to_string() + "\n";
        }
        return out;
      },
      cert);
}

}  // namespace trs
