#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "trs/termination.hpp"
#include "unit/helpers.hpp"

using namespace trs;
using namespace testutil;

namespace {

const std::vector<Symbol> kSig{{"f", 2}, {"g", 1}};

std::vector<Term> small_terms() { return all_terms(kSig, {"x", "y"}, 5); }

std::map<std::string, long> random_assignment(const Term& l, const Term& r, std::mt19937& rng) {
  std::map<std::string, long> alpha;
  for (const auto& t : {l, r})
    for (const auto& x : variables(t)) alpha[x] = static_cast<long>(rng() % 50);
  return alpha;
}

/// Rules over f/1, g/1, h/2 and a whose right-hand side only uses variables
/// of the left.
Trs random_trs(std::mt19937& rng) {
  std::vector<Symbol> sig{{"f", 1}, {"g", 1}, {"h", 2}, {"a", 0}};
  auto pick = [&](std::size_t depth, bool allow_var, auto&& self) -> Term {
    if (allow_var && (depth <= 1 || rng() % 3 == 0)) return Term::var(rng() % 2 ? "x" : "y");
    if (depth <= 1) return Term::app("a");
    const Symbol& f = sig[rng() % sig.size()];
    std::vector<Term> args;
    for (std::size_t i = 0; i < f.arity; ++i) args.push_back(self(depth - 1, true, self));
    return Term::app(f.name, args);
  };
  std::vector<Rule> rules;
  std::size_t n = 1 + rng() % 3;
  while (rules.size() < n) {
    Term l = pick(4, false, pick);
    if (l.is_var()) continue;
    Term r = pick(4, true, pick);
    auto lv = variable_set(l);
    bool ok = true;
    for (const auto& x : variables(r)) ok = ok && lv.contains(x);
    if (ok) rules.push_back(Rule{l, r, {}});
  }
  return Trs(rules);
}

std::map<std::string, long> weights_of(const KboCertificate& c) { return c.weights; }

}  // namespace

TEST(Poly, CheckExamples) {
  Trs R2 = oracle::load("beans2.trs").trs();
  PolyInterpretation good{{{"w", {1, 1}}, {"b", {1, 4}}}};
  EXPECT_TRUE(check_poly(good, R2));
  auto ev = poly_evidence(good, R2[0], "r1");
  EXPECT_TRUE(ev.holds);
  EXPECT_EQ(to_string(interpret(good, R2[0].lhs)), "16*x + 5");
  EXPECT_EQ(to_string(interpret(good, R2[0].rhs)), "x + 4");
  PolyInterpretation bad{{{"w", {1, 1}}, {"b", {1, 1}}}};
  EXPECT_FALSE(check_poly(bad, R2));
  EXPECT_TRUE(check_poly(PolyInterpretation{}, trs_of("(RULES)")));
  EXPECT_THROW(check_poly(PolyInterpretation{{{"w", {1, 1}}}}, R2), Error);
}

TEST(Poly, SearchWithTemplate) {
  auto p = oracle::load("beans2.trs");
  Trs R2 = p.trs();
  auto tmpl = parse_coefficient_template("b = 4*x1 + _", p.signature());
  auto I = prove_poly(R2, 5, tmpl);
  ASSERT_TRUE(I);
  EXPECT_TRUE(check_poly(*I, R2));
  EXPECT_EQ(I->coefficients.at("b")[1], 4);
  EXPECT_EQ(I->coefficients.at("b")[0], 1);

  Trs R1 = oracle::load("beans1.trs").trs();
  auto I1 = prove_poly(R1, 2);
  ASSERT_TRUE(I1);
  EXPECT_TRUE(check_poly(*I1, R1));
  EXPECT_FALSE(prove_poly(trs_of("(RULES a -> a)"), 5));
  EXPECT_THROW(parse_coefficient_template("q = 2*x1 + _", p.signature()), Error);
}

TEST(Poly, AbsolutePositivenessIsSound) {
  std::mt19937 rng(99);
  std::size_t accepted = 0;
  for (int k = 0; k < 300; ++k) {
    Trs R = random_trs(rng);
    PolyInterpretation I;
    for (const auto& s : R.signature()) {
      std::vector<long> c{static_cast<long>(rng() % 4)};
      for (std::size_t i = 0; i < s.arity; ++i) c.push_back(1 + static_cast<long>(rng() % 3));
      I.coefficients[s.name] = c;
    }
    if (!check_poly(I, R)) continue;
    ++accepted;
    for (const auto& r : R.rules())
      for (int i = 0; i < 1000; ++i) {
        auto alpha = random_assignment(r.lhs, r.rhs, rng);
        ASSERT_GT(oracle::poly_value(I.coefficients, r.lhs, alpha), oracle::poly_value(I.coefficients, r.rhs, alpha))
            << to_string(r);
      }
  }
  EXPECT_GT(accepted, 10u);
}

TEST(Matrix, DimensionOneMatchesPoly) {
  std::mt19937 rng(7);
  std::size_t agree = 0;
  for (int k = 0; k < 300; ++k) {
    Trs R = random_trs(rng);
    PolyInterpretation I;
    for (const auto& s : R.signature()) {
      std::vector<long> c{static_cast<long>(rng() % 3)};
      for (std::size_t i = 0; i < s.arity; ++i) c.push_back(1 + static_cast<long>(rng() % 2));
      I.coefficients[s.name] = c;
    }
    EXPECT_EQ(check_poly(I, R), check_matrix(to_matrix(I), R));
    EXPECT_EQ(to_poly(to_matrix(I)), I);
    ++agree;
  }
  Trs R2 = oracle::load("beans2.trs").trs();
  auto M = prove_matrix(R2, 1, 5);
  ASSERT_TRUE(M);
  EXPECT_TRUE(check_poly(to_poly(*M), R2));
  EXPECT_EQ(agree, 300u);
}

TEST(Matrix, ExamplesAndSpotChecks) {
  Trs tie = trs_of("(VAR x)(RULES f(x) -> g(x))");
  MatrixInterpretation I;
  I.dim = 1;
  I.symbols["f"] = MatrixSymbol{{{{1}}}, {1}};
  I.symbols["g"] = MatrixSymbol{{{{1}}}, {1}};
  EXPECT_FALSE(check_matrix(I, tie));

  Trs R = trs_of("(VAR x)(RULES f(f(x)) -> f(g(f(x))))");
  std::optional<MatrixInterpretation> found;
  for (long bound = 1; bound <= 3 && !found; ++bound) found = prove_matrix(R, 2, bound);
  ASSERT_TRUE(found);
  EXPECT_TRUE(check_matrix(*found, R));
  EXPECT_FALSE(prove_poly(R, 5));
  std::mt19937 rng(1);
  for (int i = 0; i < 1000; ++i) {
    std::map<std::string, oracle::Vec> alpha{{"x", {static_cast<long>(rng() % 20), static_cast<long>(rng() % 20)}}};
    auto l = oracle::matrix_value(*found, R[0].lhs, alpha);
    auto r = oracle::matrix_value(*found, R[0].rhs, alpha);
    ASSERT_GT(l[0], r[0]);
    ASSERT_GE(l[1], r[1]);
  }
  EXPECT_THROW(prove_matrix(R, 4, 1), Error);
}

TEST(Orders, LpoAgreesWithReferenceAndIsAStrictOrder) {
  auto terms = small_terms();
  ASSERT_GT(terms.size(), 30u);
  for (const auto& ranking : {std::vector<std::string>{"f", "g"}, std::vector<std::string>{"g", "f"}}) {
    Precedence prec(ranking);
    std::vector<std::vector<char>> gt(terms.size(), std::vector<char>(terms.size(), 0));
    for (std::size_t i = 0; i < terms.size(); ++i)
      for (std::size_t j = 0; j < terms.size(); ++j) {
        bool v = lpo_gt(prec, terms[i], terms[j]);
        ASSERT_EQ(v, oracle::lpo_gt(ranking, terms[i], terms[j])) << to_string(terms[i]) << " > " << to_string(terms[j]);
        gt[i][j] = v;
      }
    for (std::size_t i = 0; i < terms.size(); ++i) {
      EXPECT_FALSE(gt[i][i]);
      for (std::size_t j = 0; j < terms.size(); ++j) {
        if (!gt[i][j]) continue;
        EXPECT_FALSE(gt[j][i]);
        for (std::size_t k = 0; k < terms.size(); ++k)
          if (gt[j][k]) {
            EXPECT_TRUE(gt[i][k]);
          }
      }
    }
  }
  EXPECT_FALSE(lpo_gt(Precedence({"f", "g"}), T("x"), T("y")));
}

TEST(Orders, KboAgreesWithReferenceAndIsAStrictOrder) {
  auto terms = small_terms();
  std::vector<KboCertificate> certs{
      KboCertificate{{{"f", 1}, {"g", 1}}, 1, Precedence({"f", "g"})},
      KboCertificate{{{"f", 2}, {"g", 1}}, 1, Precedence({"g", "f"})},
      KboCertificate{{{"f", 0}, {"g", 0}}, 1, Precedence({"g", "f"})},
  };
  for (const auto& c : certs) {
    ASSERT_TRUE(kbo_admissible(c, kSig));
    ASSERT_EQ(kbo_admissible(c, kSig), oracle::kbo_admissible(c.weights, c.w0, c.precedence.ranking(), kSig));
    std::vector<std::vector<char>> gt(terms.size(), std::vector<char>(terms.size(), 0));
    for (std::size_t i = 0; i < terms.size(); ++i)
      for (std::size_t j = 0; j < terms.size(); ++j) {
        bool v = kbo_gt(c, terms[i], terms[j]);
        ASSERT_EQ(v, oracle::kbo_gt(c.weights, c.w0, c.precedence.ranking(), terms[i], terms[j]))
            << to_string(terms[i]) << " > " << to_string(terms[j]);
        gt[i][j] = v;
      }
    for (std::size_t i = 0; i < terms.size(); ++i) {
      EXPECT_FALSE(gt[i][i]);
      for (std::size_t j = 0; j < terms.size(); ++j) {
        if (!gt[i][j]) continue;
        EXPECT_FALSE(gt[j][i]);
        for (std::size_t k = 0; k < terms.size(); ++k)
          if (gt[j][k]) {
            EXPECT_TRUE(gt[i][k]);
          }
      }
    }
  }
  KboCertificate not_admissible{{{"f", 1}, {"g", 0}}, 1, Precedence({"f", "g"})};
  EXPECT_FALSE(kbo_admissible(not_admissible, kSig));
  KboCertificate unit{{{"f", 1}, {"g", 1}}, 1, Precedence({"f", "g"})};
  EXPECT_FALSE(kbo_gt(unit, T("g(x)"), T("f(x,x)")));
  EXPECT_FALSE(kbo_gt(unit, T("g(g(g(x)))"), T("f(x,x)")));
}

TEST(Orders, StableUnderSubstitutionAndContexts) {
  auto terms = small_terms();
  auto images = all_terms(kSig, {"z"}, 3);
  std::mt19937 rng(4);
  Precedence prec({"f", "g"});
  KboCertificate kbo{{{"f", 1}, {"g", 1}}, 1, prec};
  std::size_t checked = 0;
  for (const auto& s : terms)
    for (const auto& t : terms) {
      bool l = lpo_gt(prec, s, t), k = kbo_gt(kbo, s, t);
      if (!l && !k) continue;
      for (int i = 0; i < 5; ++i) {
        Substitution sigma{{"x", images[rng() % images.size()]}, {"y", images[rng() % images.size()]}};
        Term s2 = apply_subst(s, sigma), t2 = apply_subst(t, sigma);
        Term ctx = terms[rng() % terms.size()];
        auto wrap = [&](const Term& u) { return Term::app("f", {ctx, Term::app("g", {u})}); };
        if (l) {
          EXPECT_TRUE(lpo_gt(prec, s2, t2));
          EXPECT_TRUE(lpo_gt(prec, wrap(s2), wrap(t2)));
        }
        if (k) {
          EXPECT_TRUE(kbo_gt(kbo, s2, t2));
          EXPECT_TRUE(kbo_gt(kbo, wrap(s2), wrap(t2)));
        }
        ++checked;
      }
    }
  EXPECT_GT(checked, 500u);
}

TEST(Orders, SearchExamples) {
  Trs app = oracle::load("append.trs").trs();
  auto lpo = prove_lpo(app);
  ASSERT_TRUE(lpo);
  EXPECT_TRUE(lpo->precedence.gt("@", ":"));
  for (const auto& r : app.rules()) EXPECT_TRUE(oracle::lpo_gt(lpo->precedence.ranking(), r.lhs, r.rhs));
  EXPECT_FALSE(prove_lpo(trs_of("(RULES a -> b b -> a)")));

  auto p1 = oracle::load("beans1.trs");
  Trs R1 = p1.trs();
  auto kbo = prove_kbo(R1);
  ASSERT_TRUE(kbo);
  EXPECT_TRUE(oracle::kbo_admissible(weights_of(*kbo), kbo->w0, kbo->precedence.ranking(), p1.signature()));
  for (const auto& r : R1.rules())
    EXPECT_TRUE(oracle::kbo_gt(weights_of(*kbo), kbo->w0, kbo->precedence.ranking(), r.lhs, r.rhs));
  EXPECT_EQ(kbo->w0, 1);
  EXPECT_EQ(kbo->weights, (std::map<std::string, long>{{"b", 1}, {"w", 1}}));
  EXPECT_FALSE(prove_kbo(trs_of("(RULES a -> b b -> a)")));

  OrderTemplate tmpl;
  tmpl.precedence = {{":", "@"}};
  EXPECT_FALSE(prove_lpo(app, tmpl));
  tmpl.precedence = {{"zz", "@"}};
  EXPECT_THROW(prove_lpo(app, tmpl), Error);
}

TEST(Loops, Examples) {
  Trs P = oracle::load("primes.trs").trs();
  auto w = find_loop(P, 3);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->start.name(), "from");
  auto end = replay(w->start, w->trace, P);
  ASSERT_TRUE(end);
  EXPECT_EQ(subterm_at(*end, w->context_position), apply_subst(w->start, w->sigma));

  Trs aa = trs_of("(RULES a -> a)");
  auto l = find_loop(aa, 1);
  ASSERT_TRUE(l);
  EXPECT_EQ(l->trace.size(), 1u);
  EXPECT_FALSE(find_loop(oracle::load("beans1.trs").trs(), 5));
  EXPECT_THROW(find_loop(aa, 0), Error);
}

TEST(Loops, EveryWitnessReplaysAgainstReference) {
  std::mt19937 rng(31);
  std::size_t loops = 0;
  for (int k = 0; k < 200; ++k) {
    Trs R = random_trs(rng);
    std::optional<LoopWitness> w;
    try {
      w = find_loop(R, 3, 5000);
    } catch (const BudgetExceeded&) {
      continue;
    }
    if (!w) continue;
    ++loops;
    auto pairs = oracle::pairs_of(R);
    Term cur = w->start;
    for (const auto& s : w->trace) {
      auto idx = R.index_of(s.rule);
      ASSERT_TRUE(idx);
      std::map<std::string, Term> b;
      ASSERT_TRUE(oracle::match(pairs[*idx].lhs, subterm_at(cur, s.position), b));
      cur = replace_at(cur, s.position, oracle::subst(pairs[*idx].rhs, b));
    }
    std::map<std::string, Term> b;
    EXPECT_TRUE(oracle::match(w->start, subterm_at(cur, w->context_position), b));
  }
  EXPECT_GT(loops, 10u);
}

TEST(Termination, Portfolio) {
  Trs R2 = oracle::load("beans2.trs").trs();
  auto r2 = prove_termination(R2);
  EXPECT_EQ(r2.verdict, Verdict::Yes);
  EXPECT_EQ(r2.method, "poly");
  EXPECT_TRUE(verify(r2, R2));
  EXPECT_EQ(r2.evidence.size(), 4u);

  Trs P = oracle::load("primes.trs").trs();
  auto pr = prove_termination(P);
  EXPECT_EQ(pr.verdict, Verdict::No);
  ASSERT_TRUE(pr.loop);
  EXPECT_EQ(pr.loop->start.name(), "from");

  EXPECT_EQ(prove_termination(trs_of("(RULES f(a) -> a)")).verdict, Verdict::Yes);

  TerminationConfig cfg;
  cfg.method = "lpo";
  auto lpo = prove_termination(oracle::load("append.trs").trs(), cfg);
  EXPECT_EQ(lpo.method, "lpo");
  cfg.method = "nonsense";
  EXPECT_THROW(prove_termination(R2, cfg), Error);
}

TEST(Termination, YesCertificatesPassReferenceCheckers) {
  std::mt19937 rng(2024);
  for (int k = 0; k < 60; ++k) {
    Trs R = random_trs(rng);
    TerminationConfig cfg;
    cfg.max_candidates = 100000;
    for (const auto& method : {"poly", "lpo", "kbo"}) {
      cfg.method = method;
      auto rep = prove_termination(R, cfg);
      if (rep.verdict != Verdict::Yes) continue;
      for (const auto& r : R.rules()) {
        if (auto* I = std::get_if<PolyInterpretation>(&rep.certificate)) {
          for (int i = 0; i < 100; ++i) {
            auto alpha = random_assignment(r.lhs, r.rhs, rng);
            EXPECT_GT(oracle::poly_value(I->coefficients, r.lhs, alpha),
                      oracle::poly_value(I->coefficients, r.rhs, alpha));
          }
        } else if (auto* L = std::get_if<LpoCertificate>(&rep.certificate)) {
          EXPECT_TRUE(oracle::lpo_gt(L->precedence.ranking(), r.lhs, r.rhs));
        } else if (auto* K = std::get_if<KboCertificate>(&rep.certificate)) {
          EXPECT_TRUE(oracle::kbo_gt(K->weights, K->w0, K->precedence.ranking(), r.lhs, r.rhs));
          EXPECT_TRUE(oracle::kbo_admissible(K->weights, K->w0, K->precedence.ranking(), R.signature()));
        }
      }
    }
  }
}
