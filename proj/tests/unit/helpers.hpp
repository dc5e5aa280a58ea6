#pragma once

#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "oracles.hpp"

namespace testutil {

using trs::Position;
using trs::Symbol;
using trs::Term;

inline Term T(const std::string& s) { return trs::parse_term(s, {"x", "y", "z", "xs", "ys", "n", "m"}); }

inline trs::Trs trs_of(const std::string& text) { return trs::parse_problem(text).trs(); }

inline Term word(const std::string& letters, const Term& base) {
  Term t = base;
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) t = Term::app(std::string(1, *it), {t});
  return t;
}

inline void naive_redexes(const Term& t, const trs::Trs& R, std::vector<int>& path,
                          std::vector<std::pair<Position, std::size_t>>& out) {
  if (t.is_var()) return;
  for (std::size_t i = 0; i < R.size(); ++i) {
    std::map<std::string, Term> b;
    if (oracle::match(R[i].lhs, t, b)) out.emplace_back(Position(path), i);
  }
  for (std::size_t k = 0; k < t.arity(); ++k) {
    path.push_back(static_cast<int>(k) + 1);
    naive_redexes(t.arg(k), R, path, out);
    path.pop_back();
  }
}

/// (position, rule index) pairs, positions in preorder.
inline std::vector<std::pair<Position, std::size_t>> naive_redexes(const Term& t, const trs::Trs& R) {
  std::vector<std::pair<Position, std::size_t>> out;
  std::vector<int> path;
  naive_redexes(t, R, path, out);
  return out;
}

/// For parallel positions: p lies to the left of q.
inline bool leftof(const Position& p, const Position& q) { return p.path() < q.path(); }

/// The signature of the problem plus the constant e.
inline std::vector<Symbol> ground_signature(const trs::ProblemFile& p) {
  auto sig = p.signature();
  sig.push_back(Symbol{"e", 0});
  return sig;
}

inline Term random_term(const std::vector<Symbol>& sig, std::mt19937& rng, std::size_t depth) {
  std::vector<Symbol> pick;
  for (const auto& s : sig)
    if (depth > 1 || s.arity == 0) pick.push_back(s);
  const Symbol& f = pick[rng() % pick.size()];
  std::vector<Term> args;
  for (std::size_t i = 0; i < f.arity; ++i) args.push_back(random_term(sig, rng, depth - 1));
  return Term::app(f.name, args);
}

/// Every term of size at most n over the signature, variables included.
inline std::vector<Term> all_terms(const std::vector<Symbol>& sig, const std::vector<std::string>& vars,
                                   std::size_t n) {
  std::vector<std::vector<Term>> table(n + 1);
  for (std::size_t k = 1; k <= n; ++k) {
    if (k == 1)
      for (const auto& x : vars) table[1].push_back(Term::var(x));
    for (const auto& f : sig) {
      if (f.arity == 0) {
        if (k == 1) table[1].push_back(Term::app(f.name));
        continue;
      }
      // distribute k-1 symbols over f.arity arguments
      std::vector<std::vector<Term>> partial{{}};
      std::vector<std::size_t> used{0};
      for (std::size_t a = 0; a < f.arity; ++a) {
        std::vector<std::vector<Term>> np;
        std::vector<std::size_t> nu;
        for (std::size_t j = 0; j < partial.size(); ++j)
          for (std::size_t s = 1; used[j] + s <= k - 1; ++s)
            for (const auto& u : table[s]) {
              auto v = partial[j];
              v.push_back(u);
              np.push_back(v);
              nu.push_back(used[j] + s);
            }
        partial = np;
        used = nu;
      }
      for (std::size_t j = 0; j < partial.size(); ++j)
        if (used[j] == k - 1) table[k].push_back(Term::app(f.name, partial[j]));
    }
  }
  std::vector<Term> out;
  for (const auto& layer : table) out.insert(out.end(), layer.begin(), layer.end());
  return out;
}

}  // namespace testutil
