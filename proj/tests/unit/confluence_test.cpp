#include <gtest/gtest.h>

#include "oracles.hpp"
#include "trs/confluence.hpp"
#include "unit/helpers.hpp"

using namespace trs;
using namespace testutil;

namespace {

bool variant_pair(const Term& a, const Term& b, const Term& c, const Term& d) {
  Term p = Term::app("pair", {a, b}), q = Term::app("pair", {c, d});
  std::map<std::string, Term> m1, m2;
  return oracle::match(p, q, m1) && oracle::match(q, p, m2);
}

/// (s, t) is an instance of the critical pair (l, r) or of (r, l).
bool instance_of_cp(const Term& s, const Term& t, const std::vector<CriticalPair>& cps) {
  Term st = Term::app("pair", {s, t});
  for (const auto& cp : cps)
    for (const auto& pat : {Term::app("pair", {cp.left, cp.right}), Term::app("pair", {cp.right, cp.left})}) {
      std::map<std::string, Term> b;
      if (oracle::match(pat, st, b)) return true;
    }
  return false;
}

}  // namespace

TEST(CriticalPairs, Counts) {
  EXPECT_EQ(critical_pairs(oracle::load("beans1.trs").trs()).size(), 8u);
  EXPECT_TRUE(critical_pairs(oracle::load("primes.trs").trs()).empty());
  EXPECT_TRUE(critical_pairs(trs_of("(RULES)")).empty());
}

TEST(CriticalPairs, SelfOverlapOfWhiteRule) {
  auto cps = critical_pairs(oracle::load("beans1.trs").trs());
  std::size_t found = 0;
  for (const auto& cp : cps)
    if (cp.source.inner_index == 1 && cp.source.outer_index == 1) {
      ++found;
      EXPECT_EQ(cp.source.position, (Position{1}));
      EXPECT_TRUE(variant_pair(cp.left, cp.right, T("w(w(x))"), T("w(w(x))")));
      EXPECT_TRUE(variant_pair(cp.peak_top, cp.peak_top, T("w(w(w(x)))"), T("w(w(w(x)))")));
    }
  EXPECT_EQ(found, 1u);
}

TEST(CriticalPairs, Invariants) {
  for (const auto& file : {"beans1.trs", "beans2.trs", "g.trs", "ars.trs", "shuffle.trs", "annotations.trs"}) {
    Trs R = oracle::load(file).trs();
    auto pairs = oracle::pairs_of(R);
    auto cps = critical_pairs(R);
    for (std::size_t i = 0; i < cps.size(); ++i) {
      const auto& cp = cps[i];
      const auto& o = cp.source;
      EXPECT_FALSE(o.position.is_root() && o.inner_index == o.outer_index) << file;
      EXPECT_TRUE(subterm_at(o.outer.lhs, o.position).is_app());
      for (const auto& x : variables(o.inner.lhs))
        EXPECT_FALSE(oracle::occurs_in(x, o.outer.lhs)) << file << ": " << x;
      Term top = apply_subst(o.outer.lhs, o.mgu);
      EXPECT_EQ(apply_subst(subterm_at(o.outer.lhs, o.position), o.mgu), apply_subst(o.inner.lhs, o.mgu));
      EXPECT_TRUE(variant_pair(cp.peak_top, cp.left, top,
                               replace_at(top, o.position, apply_subst(o.inner.rhs, o.mgu))));
      EXPECT_TRUE(variant_pair(cp.peak_top, cp.right, top, apply_subst(o.outer.rhs, o.mgu)));
      auto succ = oracle::successors(cp.peak_top, pairs);
      EXPECT_TRUE(succ.contains(cp.left) && succ.contains(cp.right)) << file;
      if (i > 0) {
        const auto& p = cps[i - 1].source;
        auto key = [](const Overlap& x) { return std::make_tuple(x.outer_index, x.position.path(), x.inner_index); };
        EXPECT_LE(key(p), key(o)) << file;
      }
    }
  }
}

TEST(CriticalPairs, CriticalPairLemmaOnBeanWords) {
  Trs R1 = oracle::load("beans1.trs").trs();
  auto cps = critical_pairs(R1);
  auto pairs = oracle::pairs_of(R1);
  std::size_t peaks = 0;
  for (std::size_t n = 1; n <= 5; ++n)
    for (const auto& u : oracle::words({"b", "w"}, T("e"), n)) {
      auto rs = naive_redexes(u, R1);
      for (const auto& [p1, i1] : rs)
        for (const auto& [p2, i2] : rs) {
          auto contract = [&](const Position& p, std::size_t i) {
            std::map<std::string, Term> b;
            oracle::match(pairs[i].lhs, subterm_at(u, p), b);
            return replace_at(u, p, oracle::subst(pairs[i].rhs, b));
          };
          Term s = contract(p1, i1), t = contract(p2, i2);
          ++peaks;
          bool joined = joinable(s, t, R1, 2).joined;
          // the instance must sit at the position of the outer redex
          Position top = p1.length() <= p2.length() ? p1 : p2;
          bool instance = instance_of_cp(subterm_at(s, top), subterm_at(t, top), cps);
          EXPECT_TRUE(joined || instance) << to_string(u);
        }
    }
  EXPECT_GT(peaks, 40u);
}

TEST(CriticalPairs, Joinable) {
  Trs R1 = oracle::load("beans1.trs").trs();
  auto same = joinable(T("w(w(x))"), T("w(w(x))"), R1, 0);
  EXPECT_TRUE(same.joined);
  auto j = joinable(T("w(b(e))"), T("b(w(e))"), R1, 1);
  ASSERT_TRUE(j.joined);
  EXPECT_EQ(*j.witness, T("b(e)"));
  EXPECT_EQ(j.left_path.front(), T("w(b(e))"));
  EXPECT_EQ(j.right_path.back(), T("b(e)"));
  Trs g = oracle::load("g.trs").trs();
  EXPECT_FALSE(joinable(T("g(c)"), T("c"), g, 5).joined);
}

TEST(Confluence, Linearity) {
  EXPECT_TRUE(is_orthogonal(oracle::load("primes.trs").trs()));
  EXPECT_FALSE(is_orthogonal(oracle::load("beans1.trs").trs()));
  EXPECT_TRUE(is_left_linear(oracle::load("beans1.trs").trs()));
  Trs nl = trs_of("(VAR x)(RULES f(x,x) -> a)");
  EXPECT_FALSE(is_left_linear(nl));
  EXPECT_FALSE(is_orthogonal(nl));
}

TEST(Confluence, Newman) {
  for (const auto& file : {"beans1.trs", "beans2.trs"}) {
    Trs R = oracle::load(file).trs();
    auto term = prove_termination(R);
    ASSERT_EQ(term.verdict, Verdict::Yes) << file;
    auto nm = newman_confluence(R, term);
    EXPECT_EQ(nm.verdict, Verdict::Yes) << file;
    EXPECT_EQ(nm.joins.size(), critical_pairs(R).size());
    for (const auto& j : nm.joins) {
      EXPECT_TRUE(j.joined);
      EXPECT_EQ(j.left_path.back(), *j.common);
      EXPECT_EQ(j.right_path.back(), *j.common);
    }
  }
  Trs R1 = oracle::load("beans1.trs").trs();
  for (const auto& j : newman_confluence(R1, prove_termination(R1)).joins) {
    EXPECT_LE(j.left_path.size(), 2u);
    EXPECT_LE(j.right_path.size(), 2u);
  }
  Trs R2 = oracle::load("beans2.trs").trs();
  std::size_t longest = 0;
  for (const auto& j : newman_confluence(R2, prove_termination(R2)).joins)
    longest = std::max({longest, j.left_path.size(), j.right_path.size()});
  EXPECT_GT(longest, 2u);
  Trs empty = trs_of("(RULES)");
  EXPECT_EQ(newman_confluence(empty, prove_termination(empty)).verdict, Verdict::Yes);
  TerminationReport unproved;
  EXPECT_THROW(newman_confluence(R1, unproved), Error);
}

TEST(Confluence, Witnesses) {
  Trs g = oracle::load("g.trs").trs();
  auto w = non_confluence_witness(g);
  ASSERT_TRUE(w);
  EXPECT_TRUE(replay_witness(*w, g));
  auto pairs = oracle::pairs_of(g);
  std::set<Term> seen{w->top}, layer{w->top};
  for (int d = 0; d < 8; ++d) {
    std::set<Term> next;
    for (const auto& u : layer)
      for (const auto& v : oracle::successors(u, pairs))
        if (seen.insert(v).second) next.insert(v);
    layer = next;
  }
  EXPECT_TRUE(seen.contains(w->left) && seen.contains(w->right));
  EXPECT_TRUE(oracle::successors(w->left, pairs).empty());
  EXPECT_TRUE(oracle::successors(w->right, pairs).empty());
  EXPECT_EQ(w->top, T("g(g(g(g(c))))"));
  EXPECT_EQ(std::set<Term>({w->left, w->right}), std::set<Term>({T("g(c)"), T("c")}));

  Trs ars = oracle::load("ars.trs").trs();
  auto a = non_confluence_witness(ars);
  ASSERT_TRUE(a);
  EXPECT_TRUE(replay_witness(*a, ars));
  EXPECT_EQ(std::set<Term>({a->left, a->right}), std::set<Term>({T("c"), T("d")}));

  EXPECT_FALSE(non_confluence_witness(oracle::load("beans1.trs").trs()));
}

TEST(Confluence, GSystemIsLocallyConfluentButNotConfluent) {
  Trs g = oracle::load("g.trs").trs();
  auto cps = critical_pairs(g);
  ASSERT_FALSE(cps.empty());
  for (const auto& cp : cps) EXPECT_TRUE(joinable(cp.left, cp.right, g, 4).joined) << to_string(cp.left);
  EXPECT_TRUE(non_confluence_witness(g));
}

TEST(Confluence, Analyze) {
  auto primes = analyze_confluence(oracle::load("primes.trs").trs());
  EXPECT_EQ(primes.verdict, Verdict::Yes);
  EXPECT_EQ(primes.reason, "orthogonal");
  auto r1 = analyze_confluence(oracle::load("beans1.trs").trs());
  EXPECT_EQ(r1.verdict, Verdict::Yes);
  EXPECT_EQ(r1.reason, "newman");
  EXPECT_EQ(r1.critical_pairs.size(), 8u);
  auto g = analyze_confluence(oracle::load("g.trs").trs());
  EXPECT_EQ(g.verdict, Verdict::No);
  ASSERT_TRUE(g.witness);
  EXPECT_TRUE(replay_witness(*g.witness, oracle::load("g.trs").trs()));
}

TEST(Confluence, VerdictsNeverContradictWitnessSearch) {
  for (const auto& file : {"beans1.trs", "beans2.trs", "primes.trs", "g.trs", "ars.trs", "shuffle.trs",
                           "annotations.trs", "append.trs"}) {
    Trs R = oracle::load(file).trs();
    auto rep = analyze_confluence(R);
    if (rep.verdict == Verdict::Yes) {
      EXPECT_FALSE(non_confluence_witness(R, 6)) << file;
    }
    if (rep.verdict == Verdict::No) {
      ASSERT_TRUE(rep.witness) << file;
      EXPECT_TRUE(replay_witness(*rep.witness, R)) << file;
    }
  }
}

TEST(Confluence, BeanWordsHaveUniqueNormalForms) {
  auto pairs = oracle::pairs_of(oracle::load("beans1.trs").trs());
  for (std::size_t n = 1; n <= 8; ++n)
    for (const auto& w : oracle::words({"b", "w"}, T("e"), n + 1)) {
      auto nfs = oracle::normal_forms(w, pairs);
      ASSERT_EQ(nfs.size(), 1u) << to_string(w);
      EXPECT_EQ(nfs.begin()->size(), 2u);
    }
}
