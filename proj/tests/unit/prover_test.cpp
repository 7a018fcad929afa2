#include <gtest/gtest.h>

#include <random>

#include "minidafny/prover/ground.hpp"
#include "minidafny/prover/omega.hpp"
#include "minidafny/prover/prover.hpp"
#include "minidafny/prover/sat.hpp"
#include "oracle.hpp"
#include "session.hpp"

namespace minidafny::prover {
namespace {

using logic::Sort;
using logic::TermManager;
using logic::TermRef;
using testing::oracle_holds;

// ---- Omega test against exhaustive search ----

bool satisfies(const std::vector<LinConstraint>& cs, const std::map<int, std::int64_t>& x) {
  for (const auto& c : cs) {
    std::int64_t s = c.constant;
    for (auto [v, k] : c.coef) s += k * (x.count(v) ? x.at(v) : 0);
    if (c.equality ? s != 0 : s > 0) return false;
  }
  return true;
}

TEST(Omega, AgreesWithBruteForceInABox) {
  std::mt19937 rng(11);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int kBox = 5;
  int sat = 0, unsat = 0;
  for (int round = 0; round < 400; ++round) {
    std::vector<LinConstraint> cs;
    for (int v = 0; v < 3; ++v) {
      cs.push_back({{{v, 1}}, -kBox, false});   //  x <= 5
      cs.push_back({{{v, -1}}, -kBox, false});  // -x <= 5
    }
    int n = pick(1, 4);
    for (int k = 0; k < n; ++k) {
      LinConstraint c;
      for (int v = 0; v < 3; ++v)
        if (int a = pick(-4, 4)) c.coef[v] = a;
      c.constant = pick(-6, 6);
      c.equality = pick(0, 3) == 0;
      cs.push_back(c);
    }
    bool brute = false;
    for (int a = -kBox; a <= kBox && !brute; ++a)
      for (int b = -kBox; b <= kBox && !brute; ++b)
        for (int c = -kBox; c <= kBox && !brute; ++c) brute = satisfies(cs, {{0, a}, {1, b}, {2, c}});
    auto got = omega_solve(cs);
    ASSERT_EQ(got.has_value(), brute) << "round " << round;
    if (got) {
      EXPECT_TRUE(satisfies(cs, *got));
      ++sat;
    } else {
      ++unsat;
    }
  }
  EXPECT_GT(sat, 50);
  EXPECT_GT(unsat, 50);
}

TEST(Omega, IntegerInfeasibleDespiteRationalSolution) {
  // 3x = 2
  EXPECT_FALSE(omega_solve({{{{0, 3}}, -2, true}}));
  // 1 <= 2x <= 1 as two inequalities
  EXPECT_FALSE(omega_solve({{{{0, 2}}, -1, false}, {{{0, -2}}, 1, false}}));
}

TEST(Omega, FreeVariablesNearZero) {
  // x >= -3 alone: the closest value to 0 is 0.
  auto r = omega_solve({{{{0, -1}}, -3, false}});
  ASSERT_TRUE(r);
  EXPECT_EQ(r->at(0), 0);
  // x >= 4
  r = omega_solve({{{{0, -1}}, 4, false}});
  ASSERT_TRUE(r);
  EXPECT_EQ(r->at(0), 4);
}

// ---- CDCL against exhaustive search ----

TEST(Sat, AgreesWithBruteForce) {
  std::mt19937 rng(5);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (int round = 0; round < 300; ++round) {
    int nv = pick(3, 9);
    int nc = pick(3, 40);
    std::vector<std::vector<Lit>> clauses;
    for (int k = 0; k < nc; ++k) {
      std::vector<Lit> c;
      int w = pick(1, 3);
      for (int j = 0; j < w; ++j) c.push_back(pick(1, nv) * (pick(0, 1) ? 1 : -1));
      clauses.push_back(c);
    }
    bool brute = false;
    for (int m = 0; m < (1 << nv) && !brute; ++m) {
      bool all = true;
      for (const auto& c : clauses) {
        bool any = false;
        for (Lit l : c) any |= ((m >> (std::abs(l) - 1)) & 1) == (l > 0);
        all &= any;
      }
      brute = all;
    }
    SatSolver s;
    for (int v = 0; v < nv; ++v) s.new_var();
    for (const auto& c : clauses) s.add_clause(c);
    auto r = s.solve(nullptr, std::chrono::steady_clock::time_point::max());
    ASSERT_EQ(r == SatSolver::Result::Sat, brute) << "round " << round;
    if (brute)
      for (const auto& c : clauses) {
        bool any = false;
        for (Lit l : c) any |= s.value(std::abs(l)) == (l > 0);
        EXPECT_TRUE(any);
      }
  }
}

// ---- ground decision procedure ----

struct Fixture : ::testing::Test {
  TermManager tm;
  TermRef x = tm.mk_const("x", Sort::Int);
  TermRef y = tm.mk_const("y", Sort::Int);
  TermRef i = tm.mk_const("i", Sort::Int);
  TermRef j = tm.mk_const("j", Sort::Int);
  TermRef a = tm.mk_const("a", Sort::Ref);
  TermRef h = tm.mk_const("$heap", Sort::HeapInt);
  TermRef n(std::int64_t v) { return tm.mk_int(v); }

  GroundResult ground(std::vector<TermRef> fs) { return decide_ground(fs, tm); }
  void expect_model(const GroundResult& r, const std::vector<TermRef>& fs) {
    ASSERT_EQ(r.status, GroundResult::Status::Sat);
    for (TermRef f : fs) EXPECT_EQ(oracle_holds(f, r.model), true) << logic::to_string(f);
  }
};

TEST_F(Fixture, FeeCounterexampleInstance) {
  std::vector<TermRef> fs = {tm.mk_ge(x, n(1)), tm.mk_le(y, n(-1)),
                             tm.mk_le(tm.mk_add(tm.mk_mul(n(10), x), tm.mk_mul(n(6), y)), n(0))};
  auto r = ground(fs);
  expect_model(r, fs);
  // Minimization lands on the smallest magnitudes.
  EXPECT_EQ(r.model.ints["x"], 1);
  EXPECT_EQ(r.model.ints["y"], -2);
}

TEST_F(Fixture, Antisymmetry) {
  EXPECT_EQ(ground({tm.mk_lt(x, y), tm.mk_lt(y, x)}).status, GroundResult::Status::Unsat);
}

TEST_F(Fixture, IntegerTightening) {
  EXPECT_EQ(ground({tm.mk_eq(tm.mk_mul(n(3), x), n(2))}).status, GroundResult::Status::Unsat);
}

TEST_F(Fixture, BooleanStructure) {
  auto p = tm.mk_const("p", Sort::Bool);
  std::vector<TermRef> fs = {tm.mk_or(p, tm.mk_lt(x, n(0))), tm.mk_implies(p, tm.mk_eq(x, n(5))),
                             tm.mk_lt(n(2), x)};
  expect_model(ground(fs), fs);
}

TEST_F(Fixture, ReadOverWrite) {
  auto st = tm.mk_store(h, a, i, n(7));
  EXPECT_EQ(ground({tm.mk_ne(tm.mk_select(st, a, i), n(7))}).status, GroundResult::Status::Unsat);
  // A different index reads the old heap.
  std::vector<TermRef> fs = {tm.mk_ne(i, j), tm.mk_ne(tm.mk_select(st, a, j), tm.mk_select(h, a, j))};
  EXPECT_EQ(ground(fs).status, GroundResult::Status::Unsat);
  std::vector<TermRef> sat = {tm.mk_eq(tm.mk_select(st, a, j), n(3))};
  expect_model(ground(sat), sat);
}

TEST_F(Fixture, FunctionalConsistency) {
  auto fx = tm.mk_apply("f", Sort::Int, {x});
  auto fy = tm.mk_apply("f", Sort::Int, {y});
  EXPECT_EQ(ground({tm.mk_eq(x, y), tm.mk_ne(fx, fy)}).status, GroundResult::Status::Unsat);
  auto si = tm.mk_select(h, a, i);
  auto sj = tm.mk_select(h, a, j);
  EXPECT_EQ(ground({tm.mk_eq(i, j), tm.mk_lt(si, sj)}).status, GroundResult::Status::Unsat);
  // Lengths are never negative.
  EXPECT_EQ(ground({tm.mk_lt(tm.mk_length(a), n(0))}).status, GroundResult::Status::Unsat);
}

TEST_F(Fixture, EuclideanDivisionByLiteral) {
  // x / 2 == -2 and x % 2 == 1 forces x == -3.
  std::vector<TermRef> fs = {tm.mk_eq(tm.mk_div(x, n(2)), n(-2)), tm.mk_eq(tm.mk_mod(x, n(2)), n(1))};
  auto r = ground(fs);
  expect_model(r, fs);
  EXPECT_EQ(r.model.ints["x"], -3);
}

TEST_F(Fixture, NonlinearIsCheckedAgainstRealSemantics) {
  // x * y == 6 with 1 < x < y: any abstraction model must survive the check.
  std::vector<TermRef> fs = {tm.mk_eq(tm.mk_mul(x, y), n(6)), tm.mk_lt(n(1), x), tm.mk_lt(x, y)};
  auto r = ground(fs);
  if (r.status == GroundResult::Status::Sat) expect_model(r, fs);
  else EXPECT_EQ(r.status, GroundResult::Status::Unknown);
}

// ---- quantifiers ----

TEST_F(Fixture, InstantiationAtSkolemClosesMaintenanceStep) {
  // forall q. 0 <= q < n ==> P(q); P(n); 0 <= k < n + 1; !P(k)
  auto nn = tm.mk_const("n", Sort::Int);
  auto k = tm.mk_const("k", Sort::Int);
  auto q = tm.mk_const("q!1", Sort::Int);
  auto P = [&](TermRef t) { return tm.mk_le(n(18), tm.mk_select(h, a, t)); };
  auto hyp = tm.mk_forall(q, tm.mk_implies(tm.mk_and(tm.mk_le(n(0), q), tm.mk_lt(q, nn)), P(q)));
  std::vector<TermRef> fs = {hyp, P(nn), tm.mk_le(n(0), k), tm.mk_lt(k, tm.mk_add(nn, n(1))),
                             tm.mk_not(P(k))};
  EXPECT_EQ(check_sat(fs, tm).kind, Verdict::Kind::Proved);
  // Without P(n) the k = n case is open.
  fs.erase(fs.begin() + 1);
  auto v = check_sat(fs, tm);
  ASSERT_EQ(v.kind, Verdict::Kind::Counterexample);
  EXPECT_EQ(v.model.ints["k"], v.model.ints["n"]);
}

TEST_F(Fixture, NoUniversalsLeavesClausesUnchanged) {
  std::vector<TermRef> fs = {tm.mk_lt(x, y), tm.mk_or(tm.mk_eq(x, n(0)), tm.mk_eq(y, n(0)))};
  auto g = instantiate_quantifiers(fs, tm, 3);
  EXPECT_EQ(tm.mk_and(g.clauses), tm.mk_and(fs));
  EXPECT_EQ(g.instances, 0);
}

TEST_F(Fixture, AlternatingQuantifiersUnsupported) {
  auto q = tm.mk_const("q!1", Sort::Int);
  auto r = tm.mk_const("r!2", Sort::Int);
  auto hyp = tm.mk_forall(q, tm.mk_exists(r, tm.mk_lt(q, r)));
  auto v = check_sat({hyp, tm.mk_lt(x, n(0))}, tm);
  EXPECT_EQ(v.kind, Verdict::Kind::Unknown);
  EXPECT_EQ(v.reason, reason::kUnsupported);
}

TEST_F(Fixture, InstanceCapReportsLimit) {
  auto q = tm.mk_const("q!1", Sort::Int);
  // Every instance creates a new ground term q + 1, so rounds keep growing.
  auto hyp = tm.mk_forall(q, tm.mk_lt(tm.mk_select(h, a, q), tm.mk_select(h, a, tm.mk_add(q, n(1)))));
  auto g = instantiate_quantifiers({hyp, tm.mk_eq(x, n(0))}, tm, 50, 5);
  EXPECT_TRUE(g.limit_hit);
}

TEST_F(Fixture, SkolemizeTopLevelExistential) {
  auto q = tm.mk_const("q!1", Sort::Int);
  auto f = tm.mk_exists(q, tm.mk_lt(x, q));
  auto s = skolemize(to_nnf(f, tm), tm);
  EXPECT_FALSE(s.unsupported);
  EXPECT_FALSE(logic::has_quantifier(s.formula));
  EXPECT_TRUE(logic::free_consts(s.formula).count(q));
}

TEST_F(Fixture, NnfPushesNegation) {
  auto q = tm.mk_const("q!1", Sort::Int);
  auto f = tm.mk_not(tm.mk_forall(q, tm.mk_lt(x, q)));
  auto g = to_nnf(f, tm);
  EXPECT_EQ(g->op, logic::Op::Exists);
}

TEST(Prove, ArithmeticTautology) {
  TermManager tm;
  auto x = tm.mk_const("x", Sort::Int);
  vcgen::VerificationCondition vc;
  vc.goal = tm.mk_implies(tm.mk_le(tm.mk_int(0), x), tm.mk_lt(tm.mk_int(0), tm.mk_add(x, tm.mk_int(1))));
  EXPECT_EQ(prove(vc, tm).kind, Verdict::Kind::Proved);
}

TEST(Prove, FigureOneModel) {
  testing::Session s(testing::corpus_file("fee_children_int.mdfy"));
  auto out = s.prove_all("EdinburghCastleVisitorCenter.CalculateEdiCastleVisitFee");
  ASSERT_EQ(out.size(), 1u);
  const auto& v = out[0].verdict;
  ASSERT_EQ(v.kind, Verdict::Kind::Counterexample);
  auto na = v.model.ints.at("numAdults");
  auto nc = v.model.ints.at("numChildren");
  EXPECT_GE(na, 1);
  EXPECT_LE(10 * na + 6 * nc, 0);
  EXPECT_EQ(na, 1);
  EXPECT_EQ(nc, -2);
  for (TermRef f : v.ground_core) EXPECT_EQ(oracle_holds(f, v.model), true) << logic::to_string(f);
}

TEST(Prove, LoopWithoutInvariantGivesExitModel) {
  testing::Session s(testing::corpus_file("audio_guides_no_invariant.mdfy"));
  for (const auto& o : s.prove_all("EdinburghCastleVisitorCenter.AssignAudioGuides")) {
    if (o.vc.kind != ir::ObligationKind::AssertStmt) continue;
    ASSERT_EQ(o.verdict.kind, Verdict::Kind::Counterexample);
    const auto& m = o.verdict.model.ints;
    std::int64_t assigned = 0;
    for (const auto& [name, val] : m)
      if (name.rfind("numAssignedGuides@", 0) == 0) assigned = val;
    EXPECT_GT(assigned, m.at("numPeople"));
  }
}

TEST(Prove, DeterministicFirstModel) {
  std::vector<std::string> seen;
  for (int k = 0; k < 3; ++k) {
    testing::Session s(testing::corpus_file("verify_adults_no_forall_invariant.mdfy"));
    std::string text;
    for (const auto& o : s.prove_all("EdinburghCastleVisitorCenter.VerifyAdults")) {
      text += std::string(to_string(o.verdict.kind)) + ";";
      for (const auto& [n, v] : o.verdict.model.ints) text += n + "=" + std::to_string(v) + ",";
      for (const auto& [r, l] : o.verdict.model.lengths) text += "len" + std::to_string(r) + "=" + std::to_string(l) + ",";
    }
    seen.push_back(text);
  }
  EXPECT_EQ(seen[0], seen[1]);
  EXPECT_EQ(seen[1], seen[2]);
}

}  // namespace
}  // namespace minidafny::prover
