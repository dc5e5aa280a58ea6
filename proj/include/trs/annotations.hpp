#pragma once

// Strategy annotations: per-symbol lists of argument indices and rule ids.
//
//   and : [2, alpha, beta, 1]
//   or  : [1, gamma, delta, 2]
//   T   : []

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "trs/rewrite.hpp"

namespace trs {

struct ArgIndex {
  std::size_t index;  // 1-based
  friend bool operator==(const ArgIndex&, const ArgIndex&) = default;
};

struct RuleRef {
  std::string rule;
  friend bool operator==(const RuleRef&, const RuleRef&) = default;
};

using AnnotationEntry = std::variant<ArgIndex, RuleRef>;

inline std::string to_string(const AnnotationEntry& e) {
  if (const auto* a = std::get_if<ArgIndex>(&e)) return std::to_string(a->index);
  return std::get<RuleRef>(e).rule;
}

struct Annotation {
  std::map<std::string, std::vector<AnnotationEntry>> entries;

  const std::vector<AnnotationEntry>& of(const std::string& f) const {
    static const std::vector<AnnotationEntry> none;
    auto it = entries.find(f);
    return it == entries.end() ? none : it->second;
  }
};

/// Parses one `f : [entries]` line per symbol and validates it against R:
/// indices within arity, rule ids rooted at f, no duplicates.
inline Annotation parse_annotation(const std::string& text, const Trs& R) {
  Annotation A;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    s.erase(0, s.find_first_not_of(" \t\r"));
    s.erase(s.find_last_not_of(" \t\r") + 1);
    return s;
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::string where = "annotation line " + std::to_string(lineno);
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto colon = line.rfind(':', line.find('['));
    auto open = line.find('[');
    auto close = line.rfind(']');
    if (colon == std::string::npos || open == std::string::npos || close == std::string::npos || close < open)
      throw Error("annotation-syntax", where + ": expected 'f : [entries]'", where);
    std::string f = trim(line.substr(0, colon));
    auto arity = R.arity_of(f);
    if (!arity) throw Error("annotation-invalid", where + ": " + f + " is not in the signature", where);
    if (A.entries.contains(f)) throw Error("annotation-invalid", where + ": " + f + " is annotated twice", where);
    std::vector<AnnotationEntry> list;
    std::stringstream items(line.substr(open + 1, close - open - 1));
    std::string item;
    while (std::getline(items, item, ',')) {
      item = trim(item);
      if (item.empty()) {
        if (items.eof() && list.empty()) break;
        throw Error("annotation-syntax", where + ": empty entry", where);
      }
      AnnotationEntry e;
      if (std::all_of(item.begin(), item.end(), ::isdigit)) {
        std::size_t i = std::stoul(item);
        if (i < 1 || i > *arity)
          throw Error("annotation-invalid",
                      where + ": argument " + item + " out of range for " + f + "/" + std::to_string(*arity), where);
        e = ArgIndex{i};
      } else {
        auto idx = R.index_of(item);
        if (!idx) throw Error("annotation-invalid", where + ": unknown rule " + item, where);
        if (R[*idx].lhs.name() != f)
          throw Error("annotation-invalid", where + ": rule " + item + " is not rooted at " + f, where);
        e = RuleRef{item};
      }
      if (std::find(list.begin(), list.end(), e) != list.end())
        throw Error("annotation-invalid", where + ": duplicate entry " + item, where);
      list.push_back(e);
    }
    A.entries[f] = list;
  }
  return A;
}

/// [1..n, rules of f] reproduces leftmost-innermost; rules_first gives
/// [rules of f, 1..n], i.e. leftmost-outermost.
inline Annotation canonical_annotation(const Trs& R, bool rules_first) {
  Annotation A;
  for (const auto& s : R.signature()) {
    std::vector<AnnotationEntry> args, rules;
    for (std::size_t i = 1; i <= s.arity; ++i) args.push_back(ArgIndex{i});
    for (std::size_t i = 0; i < R.size(); ++i)
      if (R[i].lhs.name() == s.name) rules.push_back(RuleRef{R.label(i)});
    auto& out = A.entries[s.name];
    if (rules_first) {
      out = rules;
      out.insert(out.end(), args.begin(), args.end());
    } else {
      out = args;
      out.insert(out.end(), rules.begin(), rules.end());
    }
  }
  return A;
}

struct AnnotationViolation {
  std::string symbol;
  std::string problem;  // "missing argument 1", "missing rule gamma", "rule alpha before argument 2"
  friend bool operator==(const AnnotationViolation&, const AnnotationViolation&) = default;
};

struct AnnotationReport {
  bool full = true;
  bool in_time = true;
  std::vector<AnnotationViolation> violations;
};

/// An absent argument index is a fullness violation only; in-time is broken
/// when a needed index is listed after the rule.
inline AnnotationReport check_annotation(const Annotation& A, const Trs& R) {
  AnnotationReport rep;
  for (const auto& s : R.signature()) {
    const auto& list = A.of(s.name);
    auto has = [&](const AnnotationEntry& e) { return std::find(list.begin(), list.end(), e) != list.end(); };
    for (std::size_t i = 1; i <= s.arity; ++i)
      if (!has(ArgIndex{i})) {
        rep.full = false;
        rep.violations.push_back({s.name, "missing argument " + std::to_string(i)});
      }
    for (std::size_t i = 0; i < R.size(); ++i)
      if (R[i].lhs.name() == s.name && !has(RuleRef{R.label(i)})) {
        rep.full = false;
        rep.violations.push_back({s.name, "missing rule " + R.label(i)});
      }
    for (std::size_t k = 0; k < list.size(); ++k) {
      const auto* ref = std::get_if<RuleRef>(&list[k]);
      if (!ref) continue;
      auto idx = R.index_of(ref->rule);
      if (!idx) continue;
      const Term& lhs = R[*idx].lhs;
      for (std::size_t i = 1; i <= lhs.arity(); ++i) {
        if (lhs.arg(i - 1).is_var()) continue;
        auto at = std::find(list.begin(), list.end(), AnnotationEntry{ArgIndex{i}});
        if (at != list.end() && at > list.begin() + static_cast<long>(k)) {
          rep.in_time = false;
          rep.violations.push_back({s.name, "rule " + ref->rule + " before argument " + std::to_string(i)});
        }
      }
    }
  }
  return rep;
}

namespace detail {
inline std::optional<Redex> annotated_redex(const Term& t, const Trs& R, const Annotation& A, std::vector<int>& path) {
  if (t.is_var()) return std::nullopt;
  for (const auto& e : A.of(t.name())) {
    if (const auto* a = std::get_if<ArgIndex>(&e)) {
      if (a->index > t.arity()) continue;
      path.push_back(static_cast<int>(a->index));
      auto r = annotated_redex(t.arg(a->index - 1), R, A, path);
      path.pop_back();
      if (r) return r;
    } else {
      auto idx = R.index_of(std::get<RuleRef>(e).rule);
      if (!idx) continue;
      if (auto sigma = match(R[*idx].lhs, t)) return Redex{Position(path), *idx, R[*idx], std::move(*sigma)};
    }
  }
  return std::nullopt;
}
}  // namespace detail

/// Redex selected by the annotation scan from the root; nullopt means Stuck.
inline std::optional<Redex> annotated_redex(const Term& t, const Trs& R, const Annotation& A) {
  std::vector<int> path;
  return detail::annotated_redex(t, R, A, path);
}

inline std::optional<StepResult> annotated_step(const Term& t, const Trs& R, const Annotation& A) {
  auto r = annotated_redex(t, R, A);
  if (!r) return std::nullopt;
  return StepResult{contract(t, *r), *r, 1};
}

/// Stuck when the scan finds no redex; a Stuck result on a term that still
/// has redexes shows the annotation is not full.
inline NormalizeResult annotated_normalize(const Term& t, const Trs& R, const Annotation& A, std::size_t fuel,
                                           const Deadline& deadline = {}) {
  if (fuel == 0) throw Error("usage", "fuel must be at least 1");
  NormalizeResult res{NormalizeResult::Outcome::NormalForm, t, {}, {}};
  for (std::size_t i = 0; i < fuel; ++i) {
    if ((i & 63) == 63) check_deadline(deadline);
    auto s = annotated_step(res.term, R, A);
    if (!s) {
      if (!is_normal_form(res.term, R)) res.outcome = NormalizeResult::Outcome::Stuck;
      return res;
    }
    res.steps.push_back(StepRecord{s->redex.position, R.label(s->redex.rule_index)});
    res.term = s->term;
    res.trace.push_back(res.term);
  }
  if (!annotated_redex(res.term, R, A)) {
    if (!is_normal_form(res.term, R)) res.outcome = NormalizeResult::Outcome::Stuck;
  } else {
    res.outcome = NormalizeResult::Outcome::FuelExhausted;
  }
  return res;
}

/// Same strategy as annotated_normalize, but after a contraction the scan
/// resumes at the contraction site: the entry lists of the enclosing
/// symbols are kept on a stack and only the innermost frame restarts.
inline NormalizeResult normalize_incremental(const Term& t, const Trs& R, const Annotation& A, std::size_t fuel,
                                             const Deadline& deadline = {}) {
  if (fuel == 0) throw Error("usage", "fuel must be at least 1");
  auto report = check_annotation(A, R);
  if (!report.full) throw Error("annotation-not-full", "normalize_incremental needs a full annotation");
  if (!report.in_time) throw Error("annotation-not-in-time", "normalize_incremental needs an in-time annotation");

  NormalizeResult res{NormalizeResult::Outcome::NormalForm, t, {}, {}};
  struct Frame {
    std::size_t next;  // entry index to try next
  };
  // frames[k] scans the subterm at the first k indices of path
  std::vector<Frame> frames{{0}};
  std::vector<int> path;
  std::vector<const Term*> subterms{&res.term};
  std::size_t steps = 0;
  while (!frames.empty()) {
    if ((steps & 63) == 63) check_deadline(deadline);
    const Term& cur = *subterms.back();
    const auto& list = cur.is_var() ? Annotation{}.of("") : A.of(cur.name());
    Frame& fr = frames.back();
    if (fr.next >= list.size()) {
      frames.pop_back();
      subterms.pop_back();
      if (!path.empty()) path.pop_back();
      continue;
    }
    const AnnotationEntry& e = list[fr.next++];
    if (const auto* a = std::get_if<ArgIndex>(&e)) {
      path.push_back(static_cast<int>(a->index));
      subterms.push_back(&cur.arg(a->index - 1));
      frames.push_back({0});
      continue;
    }
    auto idx = R.index_of(std::get<RuleRef>(e).rule);
    auto sigma = idx ? match(R[*idx].lhs, cur) : std::nullopt;
    if (!sigma) continue;
    if (steps == fuel) {
      res.outcome = NormalizeResult::Outcome::FuelExhausted;
      return res;
    }
    Position at(path);
    res.term = replace_at(res.term, at, apply_subst(R[*idx].rhs, *sigma));
    res.steps.push_back(StepRecord{at, R.label(*idx)});
    res.trace.push_back(res.term);
    ++steps;
    subterms.assign(1, &res.term);
    for (int i : path) subterms.push_back(&subterms.back()->arg(static_cast<std::size_t>(i) - 1));
    frames.back().next = 0;
  }
  if (!is_normal_form(res.term, R)) res.outcome = NormalizeResult::Outcome::Stuck;
  return res;
}

}  // namespace trs
