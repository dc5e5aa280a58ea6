#pragma once

// JSON views of every report, plus session and order (de)serialization.
// Terms are written in the printed prefix syntax.

#include <set>
#include <string>

#include "json.hpp"
#include "trs/annotations.hpp"
#include "trs/completion.hpp"
#include "trs/complexity.hpp"
#include "trs/confluence.hpp"
#include "trs/format.hpp"
#include "trs/termination.hpp"

namespace trs::json {

using Json = nlohmann::ordered_json;

inline Json error(const std::string& code, const std::string& message, const std::string& detail = {}) {
  return Json{{"error", {{"code", code}, {"message", message}, {"detail", detail}}}};
}

inline Json error(const Error& e) { return error(e.code(), e.what(), e.detail()); }

inline Json terms(const std::vector<Term>& ts) {
  Json out = Json::array();
  for (const auto& t : ts) out.push_back(to_string(t));
  return out;
}

inline Json steps(const std::vector<StepRecord>& ss) {
  Json out = Json::array();
  for (const auto& s : ss) out.push_back({{"position", s.position.to_string()}, {"rule", s.rule}});
  return out;
}

inline Json problem(const ProblemFile& p) {
  Json rules = Json::array();
  Trs R = p.trs();
  for (std::size_t i = 0; i < R.size(); ++i)
    rules.push_back({{"id", R.label(i)}, {"lhs", to_string(R[i].lhs)}, {"rhs", to_string(R[i].rhs)}});
  Json eqs = Json::array();
  for (const auto& e : p.equations) eqs.push_back({{"lhs", to_string(e.lhs)}, {"rhs", to_string(e.rhs)}});
  Json sig = Json::array();
  for (const auto& s : p.signature()) sig.push_back({{"name", s.name}, {"arity", s.arity}});
  return Json{{"variables", p.variables}, {"signature", sig}, {"rules", rules}, {"equations", eqs}};
}

inline Json normalize_result(const Term& start, const std::string& strategy, const NormalizeResult& r) {
  Json trace = Json::array();
  for (std::size_t i = 0; i < r.steps.size(); ++i)
    trace.push_back({{"position", r.steps[i].position.to_string()}, {"rule", r.steps[i].rule},
                     {"term", to_string(r.trace[i])}});
  return Json{{"strategy", strategy},  {"start", to_string(start)}, {"outcome", to_string(r.outcome)},
              {"result", to_string(r.term)}, {"steps", r.steps.size()}, {"trace", trace}};
}

inline Json critical_pair(const CriticalPair& cp, const Trs& R) {
  return Json{{"left", to_string(cp.left)},
              {"right", to_string(cp.right)},
              {"peak", to_string(cp.peak_top)},
              {"outer", R.label(cp.source.outer_index)},
              {"inner", R.label(cp.source.inner_index)},
              {"position", cp.source.position.to_string()}};
}

inline Json critical_pairs(const std::vector<CriticalPair>& cps, const Trs& R) {
  Json list = Json::array();
  for (const auto& cp : cps) list.push_back(critical_pair(cp, R));
  return Json{{"count", cps.size()}, {"criticalPairs", list}};
}

inline Json certificate(const TerminationCertificate& cert) {
  return std::visit(
      [](const auto& c) -> Json {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, PolyInterpretation>) {
          Json interp = Json::object();
          Json text = Json::array();
          for (const auto& [f, cs] : c.coefficients) {
            interp[f] = cs;
            text.push_back(describe(c, f));
          }
          return Json{{"kind", "poly"}, {"coefficients", interp}, {"text", text}};
        } else if constexpr (std::is_same_v<C, MatrixInterpretation>) {
          Json syms = Json::object();
          Json text = Json::array();
          for (const auto& [f, s] : c.symbols) {
            syms[f] = {{"matrices", s.args}, {"constant", s.constant}};
            text.push_back(describe(c, f));
          }
          return Json{{"kind", "matrix"}, {"dimension", c.dim}, {"symbols", syms}, {"text", text}};
        } else if constexpr (std::is_same_v<C, LpoCertificate>) {
          Json facts = Json::array();
          for (const auto& [f, g] : c.precedence.facts()) facts.push_back(f + " > " + g);
          return Json{{"kind", "lpo"}, {"precedence", c.precedence.ranking()}, {"facts", facts}};
        } else if constexpr (std::is_same_v<C, KboCertificate>) {
          return Json{{"kind", "kbo"}, {"w0", c.w0}, {"weights", c.weights}, {"precedence", c.precedence.ranking()}};
        } else {
          return nullptr;
        }
      },
      cert);
}

inline Json loop_witness(const LoopWitness& w) {
  Json sigma = Json::object();
  for (const auto& [x, t] : w.sigma) sigma[x] = to_string(t);
  return Json{{"start", to_string(w.start)},
              {"trace", steps(w.trace)},
              {"contextPosition", w.context_position.to_string()},
              {"substitution", sigma}};
}

inline Json termination(const TerminationReport& r) {
  Json ev = Json::array();
  for (const auto& e : r.evidence)
    ev.push_back({{"rule", e.rule}, {"lhs", e.lhs}, {"rhs", e.rhs}, {"evidence", e.evidence}, {"holds", e.holds}});
  Json out{{"verdict", to_string(r.verdict)},
           {"method", r.method.empty() ? Json(nullptr) : Json(r.method)},
           {"certificate", certificate(r.certificate)},
           {"perRuleEvidence", ev}};
  if (r.loop) out["loop"] = loop_witness(*r.loop);
  out["notes"] = r.notes;
  return out;
}

inline Json witness(const NonConfluenceWitness& w) {
  return Json{{"top", to_string(w.top)},
              {"left", to_string(w.left)},
              {"right", to_string(w.right)},
              {"leftSteps", steps(w.left_steps)},
              {"rightSteps", steps(w.right_steps)}};
}

inline Json confluence(const ConfluenceReport& r) {
  Json cps = Json::array();
  for (const auto& j : r.critical_pairs)
    cps.push_back({{"left", to_string(j.cp.left)},
                   {"right", to_string(j.cp.right)},
                   {"joinTrace",
                    {{"joined", j.joined},
                     {"common", j.common ? Json(to_string(*j.common)) : Json(nullptr)},
                     {"left", terms(j.left_path)},
                     {"right", terms(j.right_path)}}}});
  Json out{{"verdict", to_string(r.verdict)},
           {"reason", r.reason.empty() ? Json(nullptr) : Json(r.reason)},
           {"criticalPairs", cps}};
  if (r.witness) out["witness"] = witness(*r.witness);
  if (r.termination)
    out["termination"] = {{"verdict", to_string(r.termination->verdict)},
                          {"method", r.termination->method.empty() ? Json(nullptr) : Json(r.termination->method)}};
  out["notes"] = r.notes;
  return out;
}

inline Json dh_result(const Term& t, const DhResult& d) {
  Json out{{"term", to_string(t)}, {"kind", to_string(d.kind)}};
  if (d.kind == DhResult::Kind::Value) {
    out["value"] = d.value;
    out["derivation"] = terms(d.derivation);
    out["steps"] = steps(d.steps);
  } else if (d.kind == DhResult::Kind::Infinite) {
    out["cycle"] = terms(d.cycle);
  }
  out["explored"] = d.explored;
  return out;
}

inline Json curve_point(const CurvePoint& p) {
  return Json{{"kind", p.kind}, {"n", p.n}, {"value", p.value}, {"witness", to_string(p.witness)}, {"terms", p.terms}};
}

inline Json annotation_report(const AnnotationReport& r) {
  Json v = Json::array();
  for (const auto& x : r.violations) v.push_back({{"symbol", x.symbol}, {"problem", x.problem}});
  return Json{{"full", r.full}, {"inTime", r.in_time}, {"violations", v}};
}

// ---------------------------------------------------------------------------
// Orders

inline Json order(const ReductionOrder& o) {
  return std::visit(
      [](const auto& p) -> Json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LpoCertificate>)
          return Json{{"kind", "lpo"}, {"params", {{"precedence", p.precedence.ranking()}}}};
        else if constexpr (std::is_same_v<P, KboCertificate>)
          return Json{{"kind", "kbo"},
                      {"params", {{"w0", p.w0}, {"weights", p.weights}, {"precedence", p.precedence.ranking()}}}};
        else
          return Json{{"kind", "poly"}, {"params", {{"coefficients", p.coefficients}}}};
      },
      o.params());
}

namespace detail {
inline Precedence precedence_from(const Json& params, const std::vector<Symbol>& signature) {
  std::vector<std::string> ranking;
  std::set<std::string> seen;
  std::set<std::string> known;
  for (const auto& s : signature) known.insert(s.name);
  if (params.contains("precedence")) {
    for (const auto& f : params.at("precedence")) {
      std::string name = f.get<std::string>();
      if (!known.contains(name)) throw Error("unknown-symbol", "precedence mentions " + name + ", which is not in the signature");
      if (seen.insert(name).second) ranking.push_back(name);
    }
  }
  for (const auto& s : signature)
    if (seen.insert(s.name).second) ranking.push_back(s.name);
  return Precedence(ranking);
}
}  // namespace detail

/// {kind: kbo|lpo|poly, params}. Unlisted symbols follow the listed ones in
/// the precedence (in signature order); unlisted KBO weights are 1.
inline ReductionOrder order_from(const Json& j, const std::vector<Symbol>& signature) {
  if (j.is_null()) return ReductionOrder::default_kbo(signature);
  std::string kind = j.value("kind", "kbo");
  Json params = j.value("params", Json::object());
  ReductionOrder out;
  if (kind == "kbo") {
    KboCertificate c;
    c.w0 = params.value("w0", 1L);
    for (const auto& s : signature) c.weights[s.name] = 1;
    if (params.contains("weights"))
      for (const auto& [f, w] : params.at("weights").items()) {
        if (!c.weights.contains(f)) throw Error("unknown-symbol", "weight given for " + f + ", which is not in the signature");
        c.weights[f] = w.get<long>();
      }
    c.precedence = detail::precedence_from(params, signature);
    out = ReductionOrder(c);
  } else if (kind == "lpo") {
    out = ReductionOrder(LpoCertificate{detail::precedence_from(params, signature)});
  } else if (kind == "poly") {
    PolyInterpretation p;
    if (params.contains("coefficients"))
      for (const auto& [f, cs] : params.at("coefficients").items()) p.coefficients[f] = cs.get<std::vector<long>>();
    out = ReductionOrder(p);
  } else {
    throw Error("invalid-order", "unknown order kind '" + kind + "' (expected kbo, lpo or poly)");
  }
  out.check_covers(signature);
  return out;
}

// ---------------------------------------------------------------------------
// Sessions

inline Json equations(const std::vector<NumberedEquation>& es) {
  Json out = Json::array();
  for (const auto& e : es) out.push_back({{"id", e.id}, {"lhs", to_string(e.eq.lhs)}, {"rhs", to_string(e.eq.rhs)}});
  return out;
}

inline Json rules(const std::vector<NumberedRule>& rs) {
  Json out = Json::array();
  for (const auto& r : rs) out.push_back({{"id", r.id}, {"lhs", to_string(r.rule.lhs)}, {"rhs", to_string(r.rule.rhs)}});
  return out;
}

/// The view returned by the service: equations, rules, status, historyLength.
inline Json session_view(const CompletionState& s) {
  return Json{{"equations", equations(s.equations())},
              {"rules", rules(s.rules())},
              {"status", to_string(s.status())},
              {"historyLength", s.history.size()}};
}

namespace detail {
inline Json snapshot(const CompletionSnapshot& s) {
  return Json{{"equations", equations(s.equations)},
              {"rules", rules(s.rules)},
              {"nextId", s.next_id},
              {"status", to_string(s.status)}};
}

inline void collect_vars(const CompletionSnapshot& s, std::set<std::string>& vars) {
  for (const auto& e : s.equations)
    for (const auto& t : {e.eq.lhs, e.eq.rhs})
      for (const auto& x : variables(t)) vars.insert(x);
  for (const auto& r : s.rules)
    for (const auto& t : {r.rule.lhs, r.rule.rhs})
      for (const auto& x : variables(t)) vars.insert(x);
}

inline SessionStatus status_from(const std::string& s) {
  if (s == "Running") return SessionStatus::Running;
  if (s == "Success") return SessionStatus::Success;
  if (s == "Stuck") return SessionStatus::Stuck;
  throw Error("invalid-session", "unknown status '" + s + "'");
}

inline CompletionSnapshot snapshot_from(const Json& j, const std::set<std::string>& vars) {
  CompletionSnapshot s;
  for (const auto& e : j.at("equations"))
    s.equations.push_back(NumberedEquation{
        e.at("id").get<int>(),
        Equation{parse_term(e.at("lhs").get<std::string>(), vars), parse_term(e.at("rhs").get<std::string>(), vars)}});
  for (const auto& r : j.at("rules"))
    s.rules.push_back(NumberedRule{
        r.at("id").get<int>(),
        Rule{parse_term(r.at("lhs").get<std::string>(), vars), parse_term(r.at("rhs").get<std::string>(), vars), {}}});
  s.next_id = j.at("nextId").get<int>();
  s.status = status_from(j.at("status").get<std::string>());
  return s;
}
}  // namespace detail

/// Full session: {variables, signature, equations, rules, order, history[], status, nextId, fuel}.
inline Json session_export(const CompletionState& s, const std::vector<Symbol>& signature) {
  std::set<std::string> vars;
  detail::collect_vars(s.current, vars);
  for (const auto& h : s.history) detail::collect_vars(h.before, vars);
  Json hist = Json::array();
  for (const auto& h : s.history) hist.push_back({{"command", h.command}, {"before", detail::snapshot(h.before)}});
  Json sig = Json::array();
  for (const auto& x : signature) sig.push_back({{"name", x.name}, {"arity", x.arity}});
  return Json{{"variables", vars},
              {"signature", sig},
              {"equations", equations(s.equations())},
              {"rules", rules(s.rules())},
              {"order", order(s.order)},
              {"history", hist},
              {"status", to_string(s.status())},
              {"nextId", s.current.next_id},
              {"fuel", s.fuel}};
}

struct ImportedSession {
  CompletionState state;
  std::vector<Symbol> signature;
};

inline ImportedSession session_import(const Json& j) {
  try {
    std::set<std::string> vars;
    for (const auto& v : j.at("variables")) vars.insert(v.get<std::string>());
    std::vector<Symbol> sig;
    for (const auto& s : j.at("signature")) sig.push_back(Symbol{s.at("name"), s.at("arity").get<std::size_t>()});
    ImportedSession out;
    out.signature = sig;
    out.state.order = order_from(j.at("order"), sig);
    out.state.fuel = j.value("fuel", std::size_t{10000});
    Json cur{{"equations", j.at("equations")},
             {"rules", j.at("rules")},
             {"nextId", j.at("nextId")},
             {"status", j.at("status")}};
    out.state.current = detail::snapshot_from(cur, vars);
    for (const auto& h : j.at("history"))
      out.state.history.push_back(HistoryEntry{h.at("command"), detail::snapshot_from(h.at("before"), vars)});
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid-session", std::string("malformed session JSON: ") + e.what());
  }
}

}  // namespace trs::json
