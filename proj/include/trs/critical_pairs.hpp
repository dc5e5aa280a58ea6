#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "trs/rewrite.hpp"
#include "trs/term.hpp"

namespace trs {

/// ⟨inner, position, outer⟩ with the mgu of outer.lhs|position and
/// inner.lhs. Both rules are the renamed-apart variants actually unified.
struct Overlap {
  Rule inner;
  Position position;
  Rule outer;
  Substitution mgu;
  std::size_t inner_index = 0;
  std::size_t outer_index = 0;
};

/// left = outer.lhsσ[inner.rhsσ]_p, right = outer.rhsσ, peak_top = outer.lhsσ.
/// The three terms are stored with tidied variable names.
struct CriticalPair {
  Term left;
  Term right;
  Overlap source;
  Term peak_top;
};

namespace detail {
inline void overlaps_into(const Rule& inner0, std::size_t inner_index, const Rule& outer0, std::size_t outer_index,
                          bool same_rule, std::vector<CriticalPair>& out) {
  auto [inner, outer] = rename_apart(inner0, outer0);
  bool variants = same_rule || is_variant(inner0, outer0);
  for (const auto& p : fun_positions(outer.lhs)) {
    if (p.is_root() && variants) continue;
    auto mgu = unify(subterm_at(outer.lhs, p), inner.lhs);
    if (!mgu) continue;
    Term top = apply_subst(outer.lhs, *mgu);
    Term left = replace_at(top, p, apply_subst(inner.rhs, *mgu));
    Term right = apply_subst(outer.rhs, *mgu);
    auto tidy = tidy_variables({top, left, right});
    out.push_back(CriticalPair{tidy[1], tidy[2], Overlap{inner, p, outer, *mgu, inner_index, outer_index}, tidy[0]});
  }
}
}  // namespace detail

/// Critical pairs with `outer` as the enclosing rule and `inner` contracted
/// below it, positions in preorder.
inline std::vector<CriticalPair> critical_pairs_of(const Rule& inner, const Rule& outer, bool same_rule,
                                                   std::size_t inner_index = 0, std::size_t outer_index = 0) {
  std::vector<CriticalPair> out;
  detail::overlaps_into(inner, inner_index, outer, outer_index, same_rule, out);
  return out;
}

/// CP(R), ordered by (outer rule index, position, inner rule index).
inline std::vector<CriticalPair> critical_pairs(const Trs& R) {
  std::vector<CriticalPair> out;
  for (std::size_t o = 0; o < R.size(); ++o) {
    std::vector<CriticalPair> for_outer;
    for (std::size_t i = 0; i < R.size(); ++i) detail::overlaps_into(R[i], i, R[o], o, i == o, for_outer);
    std::stable_sort(for_outer.begin(), for_outer.end(), [](const CriticalPair& a, const CriticalPair& b) {
      if (a.source.position != b.source.position) return a.source.position < b.source.position;
      return a.source.inner_index < b.source.inner_index;
    });
    out.insert(out.end(), for_outer.begin(), for_outer.end());
  }
  return out;
}

struct JoinResult {
  bool joined = false;
  std::optional<Term> witness;
  std::vector<Term> left_path;   // s →* witness, s first
  std::vector<Term> right_path;  // t →* witness, t first
};

inline constexpr std::size_t kDefaultJoinDepth = 8;
inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

/// Common reduct within `depth` steps from each side. A negative answer is
/// never definitive.
inline JoinResult joinable(const Term& s, const Term& t, const Trs& R, std::size_t depth = kDefaultJoinDepth,
                           std::size_t node_cap = kDefaultNodeCap, const Deadline& deadline = {}) {
  if (s == t) return JoinResult{true, s, {s}, {t}};
  ReductionTree left(s, R, depth, node_cap, deadline);
  ReductionTree right(t, R, depth, node_cap, deadline);
  std::optional<std::size_t> best_l, best_r;
  std::size_t best = kUnbounded;
  for (std::size_t i = 0; i < left.nodes().size(); ++i) {
    auto j = right.find(left.nodes()[i].term);
    if (!j) continue;
    std::size_t cost = left.nodes()[i].depth + right.nodes()[*j].depth;
    if (cost < best) {
      best = cost;
      best_l = i;
      best_r = *j;
    }
  }
  if (!best_l) return JoinResult{};
  return JoinResult{true, left.nodes()[*best_l].term, left.path_to(*best_l), right.path_to(*best_r)};
}

}  // namespace trs
