#include <gtest/gtest.h>

#include "oracles.hpp"
#include "trs/completion.hpp"
#include "trs/confluence.hpp"
#include "trs/json_io.hpp"
#include "unit/helpers.hpp"

using namespace trs;
using namespace testutil;

namespace {

struct Fixture {
  ProblemFile problem;
  CompletionState state;
};

Fixture session(const std::string& text) {
  auto p = parse_problem(text);
  return Fixture{p, new_session(p.equations, ReductionOrder::default_kbo(p.signature()))};
}

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "none";
}

bool has_variant(const std::vector<NumberedEquation>& es, const Term& l, const Term& r) {
  for (const auto& e : es)
    if (is_variant(e.eq, Equation{l, r})) return true;
  return false;
}

}  // namespace

TEST(Completion, NewSession) {
  auto genes = oracle::load("genes.trs");
  auto st = new_session(genes.equations, ReductionOrder::default_kbo(genes.signature()));
  EXPECT_EQ(st.equations().size(), 5u);
  EXPECT_TRUE(st.rules().empty());
  EXPECT_TRUE(st.history.empty());
  EXPECT_EQ(st.status(), SessionStatus::Running);
  EXPECT_EQ(new_session({}, ReductionOrder()).status(), SessionStatus::Success);
  EXPECT_EQ(session("(EQUATIONS a == a)").state.status(), SessionStatus::Running);
}

TEST(Completion, Orient) {
  auto genes = oracle::load("genes.trs");
  auto order = ReductionOrder::default_kbo(genes.signature());
  auto st = new_session(genes.equations, order);
  auto next = orient(st, 1, Direction::LeftToRight);
  ASSERT_EQ(next.rules().size(), 1u);
  EXPECT_EQ(next.rules()[0].id, 1);
  EXPECT_EQ(next.rules()[0].rule.lhs, T("T(C(A(T(x))))"));
  EXPECT_EQ(next.equations().size(), 4u);
  EXPECT_EQ(next.history.size(), 1u);
  EXPECT_EQ(code_of([&] { orient(st, 1, Direction::RightToLeft); }), "not-orientable");

  auto loop = session("(VAR x)(EQUATIONS x == f(x))");
  EXPECT_EQ(code_of([&] { orient(loop.state, 1, Direction::LeftToRight); }), "variable-violation");
  auto fresh = session("(VAR x y)(EQUATIONS f(x) == g(y))");
  EXPECT_EQ(code_of([&] { orient(fresh.state, 1, Direction::LeftToRight); }), "variable-violation");

  // precedence b > a
  auto ab = parse_problem("(EQUATIONS a == b)");
  ReductionOrder ba(LpoCertificate{Precedence({"b", "a"})});
  auto s = new_session(ab.equations, ba);
  EXPECT_EQ(code_of([&] { orient(s, 1, Direction::LeftToRight); }), "not-orientable");
  auto rl = orient(s, 1, Direction::RightToLeft);
  EXPECT_EQ(rl.rules()[0].rule.lhs, T("b"));
  EXPECT_EQ(rl.rules()[0].rule.rhs, T("a"));
  EXPECT_EQ(rl.status(), SessionStatus::Success);
  EXPECT_EQ(code_of([&] { orient(s, 7, Direction::RightToLeft); }), "unknown-equation");
}

TEST(Completion, DeduceMatchesCriticalPairs) {
  auto f = session("(VAR x)(EQUATIONS w(w(x)) == w(x) w(b(x)) == b(x))");
  auto st = orient(orient(f.state, 1, Direction::LeftToRight), 2, Direction::LeftToRight);
  auto d = deduce(st, 1, 2);
  auto cps = critical_pairs(st.trs());
  std::size_t between = 0;
  for (const auto& cp : cps) {
    if (cp.source.inner_index == cp.source.outer_index) continue;
    ++between;
    EXPECT_TRUE(has_variant(d.equations(), cp.left, cp.right)) << to_string(cp.left) << " = " << to_string(cp.right);
  }
  EXPECT_GT(between, 0u);
  EXPECT_EQ(d.equations().size(), between);

  auto self = deduce(st, 1, 1);
  ASSERT_EQ(self.equations().size(), 1u);
  EXPECT_TRUE(has_variant(self.equations(), T("w(w(x))"), T("w(w(x))")));

  auto apart = session("(VAR x)(EQUATIONS f(x) == a g(x) == a)");
  auto ap = orient(orient(apart.state, 1, Direction::LeftToRight), 2, Direction::LeftToRight);
  EXPECT_TRUE(deduce(ap, 1, 2).equations().empty());
  EXPECT_EQ(code_of([&] { deduce(ap, 1, 9); }), "unknown-rule");
}

TEST(Completion, SimplifyAndDelete) {
  auto f = session("(VAR x)(EQUATIONS C(T(x)) == T(x) C(T(C(x))) == T(C(x)))");
  auto st = orient(f.state, 1, Direction::LeftToRight);
  auto s1 = simplify(st, 2);
  ASSERT_EQ(s1.equations().size(), 1u);
  EXPECT_EQ(s1.equations()[0].eq.lhs, T("T(C(x))"));
  EXPECT_EQ(s1.equations()[0].eq.rhs, T("T(C(x))"));
  EXPECT_EQ(code_of([&] { simplify(s1, 2); }), "not-applicable");
  auto s2 = delete_equation(s1, 2);
  EXPECT_TRUE(s2.equations().empty());
  EXPECT_EQ(s2.status(), SessionStatus::Success);
  EXPECT_EQ(code_of([&] { delete_equation(st, 2); }), "not-applicable");

  auto deep = session("(VAR x)(EQUATIONS f(x) == x g(f(f(a))) == b)");
  auto d = orient(deep.state, 1, Direction::LeftToRight);
  EXPECT_EQ(simplify(d, 2).equations()[0].eq.lhs, T("g(f(a))"));
  EXPECT_EQ(simplify(d, 2, true).equations()[0].eq.lhs, T("g(a)"));
}

TEST(Completion, ComposeAndCollapse) {
  auto f = session("(EQUATIONS a == b b == c)");
  auto st = orient(orient(f.state, 1, Direction::LeftToRight), 2, Direction::LeftToRight);
  auto c = compose(st, 1);
  EXPECT_EQ(c.rules()[0].rule.rhs, T("c"));
  EXPECT_EQ(code_of([&] { compose(st, 2); }), "not-applicable");

  auto g = session("(EQUATIONS f(a) == c a == b)");
  auto gs = orient(orient(g.state, 1, Direction::LeftToRight), 2, Direction::LeftToRight);
  auto col = collapse(gs, 1);
  ASSERT_EQ(col.rules().size(), 1u);
  ASSERT_EQ(col.equations().size(), 1u);
  EXPECT_EQ(col.equations()[0].id, 1);
  EXPECT_EQ(col.equations()[0].eq.lhs, T("f(b)"));
  EXPECT_EQ(col.equations()[0].eq.rhs, T("c"));
  EXPECT_EQ(code_of([&] { collapse(gs, 2); }), "not-applicable");

  auto single = session("(VAR x)(EQUATIONS f(f(x)) == f(x))");
  auto ss = orient(single.state, 1, Direction::LeftToRight);
  EXPECT_EQ(code_of([&] { collapse(ss, 1); }), "not-applicable");

  // same left-hand side up to renaming: not a strict encompassment
  auto twin = session("(VAR x y)(EQUATIONS f(x) == a f(y) == b)");
  auto ts = orient(orient(twin.state, 1, Direction::LeftToRight), 2, Direction::LeftToRight);
  EXPECT_EQ(code_of([&] { collapse(ts, 1); }), "not-applicable");
}

TEST(Completion, Undo) {
  auto genes = oracle::load("genes.trs");
  auto st = new_session(genes.equations, ReductionOrder::default_kbo(genes.signature()));
  EXPECT_EQ(code_of([&] { undo(st); }), "empty-history");
  EXPECT_EQ(undo(orient(st, 1, Direction::LeftToRight)), st);
  auto three = orient(orient(orient(st, 1, Direction::LeftToRight), 3, Direction::LeftToRight), 5,
                      Direction::LeftToRight);
  auto d = deduce(three, 1, 5);
  EXPECT_EQ(undo(undo(undo(undo(d)))), st);
  EXPECT_EQ(undo(d), three);
}

TEST(Completion, ApplyCommand) {
  auto genes = oracle::load("genes.trs");
  auto st = new_session(genes.equations, ReductionOrder::default_kbo(genes.signature()));
  auto o = apply_command(st, "orient", {1}, "LR");
  EXPECT_EQ(o.rules().size(), 1u);
  EXPECT_EQ(o.history.back().command, "orient 1 LR");
  EXPECT_EQ(apply_command(o, "undo", {}), st);
  EXPECT_EQ(code_of([&] { apply_command(st, "orient", {}); }), "usage");
  EXPECT_EQ(code_of([&] { apply_command(st, "fly", {}); }), "usage");
  EXPECT_EQ(code_of([&] { apply_command(st, "orient", {1}, "up"); }), "usage");
  EXPECT_EQ(code_of([&] { apply_command(st, "compose", {4}); }), "unknown-rule");
}

TEST(Completion, AutoComplete) {
  auto genes = oracle::load("genes.trs");
  auto order = ReductionOrder::default_kbo(genes.signature());
  auto res = auto_complete(genes.equations, order);
  ASSERT_EQ(res.outcome, CompletionResult::Outcome::Completed);
  Trs R = res.state.trs();
  for (const auto& r : R.rules()) EXPECT_TRUE(order.gt(r.lhs, r.rhs)) << to_string(r);
  TerminationReport term;
  term.verdict = Verdict::Yes;
  term.method = "kbo";
  term.certificate = std::get<KboCertificate>(order.params());
  auto nm = newman_confluence(R, term);
  EXPECT_EQ(nm.verdict, Verdict::Yes);

  Term e = T("e");
  auto milk = decide_validity(R, word("TAGCTAGCTAGCT", e), word("CTGACTGACT", e));
  EXPECT_TRUE(milk.valid);
  EXPECT_EQ(milk.left_nf, word("T", e));
  auto virus = decide_validity(R, word("TAGCTAGCTAGCT", e), word("CTGCTACTGACT", e));
  EXPECT_FALSE(virus.valid);
  EXPECT_EQ(virus.left_nf, word("T", e));
  EXPECT_EQ(virus.right_nf, word("TGT", e));
  EXPECT_TRUE(decide_validity(R, word("GATC", e), word("GATC", e)).valid);

  auto comm = parse_problem("(VAR x y)(EQUATIONS p(x,y) == p(y,x))");
  auto c = auto_complete(comm.equations, ReductionOrder::default_kbo(comm.signature()));
  EXPECT_EQ(c.outcome, CompletionResult::Outcome::Failed);
  EXPECT_FALSE(c.reason.empty());

  auto ab = parse_problem("(EQUATIONS a == b)");
  auto r = auto_complete(ab.equations, ReductionOrder(LpoCertificate{Precedence({"a", "b"})}));
  ASSERT_EQ(r.outcome, CompletionResult::Outcome::Completed);
  ASSERT_EQ(r.state.rules().size(), 1u);
  EXPECT_EQ(r.state.rules()[0].rule.lhs, T("a"));
  EXPECT_EQ(r.state.rules()[0].rule.rhs, T("b"));

  auto limited = auto_complete(genes.equations, order, 2);
  EXPECT_EQ(limited.outcome, CompletionResult::Outcome::FuelExhausted);
  EXPECT_EQ(limited.state.history.size(), 2u);
}

TEST(Completion, ValidityAgreesWithBoundedConversion) {
  auto genes = oracle::load("genes.trs");
  auto res = auto_complete(genes.equations, ReductionOrder::default_kbo(genes.signature()));
  ASSERT_EQ(res.outcome, CompletionResult::Outcome::Completed);
  Trs R = res.state.trs();
  std::vector<oracle::Pair> E;
  for (const auto& e : genes.equations) E.push_back({e.lhs, e.rhs});
  auto ws = oracle::words({"A", "C", "G", "T"}, T("e"), 4);
  std::size_t convertible = 0;
  for (std::size_t i = 0; i < ws.size(); ++i)
    for (std::size_t j = i + 1; j < ws.size(); ++j)
      if (oracle::convertible(ws[i], ws[j], E, 8, 20000)) {
        ++convertible;
        EXPECT_TRUE(decide_validity(R, ws[i], ws[j]).valid) << to_string(ws[i]) << " = " << to_string(ws[j]);
      }
  EXPECT_GT(convertible, 0u);
}

TEST(Completion, SessionJsonRoundTrip) {
  auto genes = oracle::load("genes.trs");
  auto st = new_session(genes.equations, ReductionOrder::default_kbo(genes.signature()));
  auto s = deduce(orient(orient(st, 1, Direction::LeftToRight), 5, Direction::LeftToRight), 1, 5);
  auto j = json::session_export(s, genes.signature());
  EXPECT_EQ(j["history"].size(), 3u);
  EXPECT_EQ(j["order"]["kind"], "kbo");
  auto back = json::session_import(json::Json::parse(j.dump()));
  EXPECT_EQ(back.state, s);
  EXPECT_EQ(back.signature, genes.signature());
  EXPECT_EQ(undo(undo(undo(back.state))), st);

  EXPECT_EQ(code_of([] { json::session_import(json::Json::parse(R"({"variables": []})")); }), "invalid-session");
}

TEST(Completion, OrderFromJson) {
  auto genes = oracle::load("genes.trs");
  auto sig = genes.signature();
  EXPECT_EQ(json::order_from(nullptr, sig), ReductionOrder::default_kbo(sig));
  auto lpo = json::order_from(json::Json::parse(R"({"kind":"lpo","params":{"precedence":["T","A"]}})"), sig);
  ASSERT_EQ(lpo.kind(), "lpo");
  EXPECT_EQ(std::get<LpoCertificate>(lpo.params()).precedence.ranking().front(), "T");
  EXPECT_EQ(std::get<LpoCertificate>(lpo.params()).precedence.ranking().size(), sig.size());
  EXPECT_EQ(json::order_from(json::order(lpo), sig), lpo);
  EXPECT_EQ(code_of([&] { json::order_from(json::Json::parse(R"({"kind":"rpo"})"), sig); }), "invalid-order");
  EXPECT_EQ(code_of([&] { json::order_from(json::Json::parse(R"({"kind":"lpo","params":{"precedence":["Q"]}})"), sig); }),
            "unknown-symbol");
  EXPECT_EQ(code_of([&] { json::order_from(json::Json::parse(R"({"kind":"kbo","params":{"weights":{"A":0}}})"), sig); }),
            "invalid-order");
}
