#include <gtest/gtest.h>

#include <sstream>

#include "minidafny/vcgen/vc.hpp"
#include "session.hpp"

namespace minidafny::vcgen {
namespace {

using ir::Command;
using ir::ObligationKind;
using prover::Verdict;
using testing::corpus_file;
using testing::Session;

const std::string kCls = "EdinburghCastleVisitorCenter.";

ir::Graph one_block(std::vector<Command> cmds) {
  ir::Graph g;
  g.name = "T";
  g.blocks.push_back({"b0", std::move(cmds), {}});
  return g;
}

TEST(Wp, AssignmentIsSubstitution) {
  logic::TermManager tm;
  auto fee = tm.mk_const("totalFee", logic::Sort::Int);
  auto post = tm.mk_lt(tm.mk_int(0), fee);
  auto g = one_block({Command::assign(fee, tm.mk_int(2)),
                      Command::assert_(post, ObligationKind::Postcondition, {}, "post")});
  auto vcs = compute_wp(g, tm);
  ASSERT_EQ(vcs.size(), 1u);
  EXPECT_EQ(vcs[0].goal, tm.mk_lt(tm.mk_int(0), tm.mk_int(2)));
}

TEST(Wp, IncrementSubstitution) {
  logic::TermManager tm;
  auto x = tm.mk_const("x", logic::Sort::Int);
  auto c = tm.mk_const("c", logic::Sort::Int);
  auto one = tm.mk_int(1);
  auto g = one_block({Command::assign(x, tm.mk_add(x, one)),
                      Command::assert_(tm.mk_eq(x, tm.mk_add(c, one)), ObligationKind::AssertStmt, {}, "a")});
  auto vcs = compute_wp(g, tm);
  ASSERT_EQ(vcs.size(), 1u);
  EXPECT_EQ(vcs[0].goal, tm.mk_eq(tm.mk_add(x, one), tm.mk_add(c, one)));
}

TEST(Wp, AssumeBecomesHypothesis) {
  logic::TermManager tm;
  auto x = tm.mk_const("x", logic::Sort::Int);
  auto pre = tm.mk_le(tm.mk_int(1), x);
  auto goal = tm.mk_lt(tm.mk_int(0), x);
  auto g = one_block({Command::assume(pre), Command::assert_(goal, ObligationKind::AssertStmt, {}, "a")});
  auto vcs = compute_wp(g, tm);
  ASSERT_EQ(vcs.size(), 1u);
  EXPECT_EQ(vcs[0].goal, tm.mk_implies(pre, goal));
}

TEST(Wp, EarlierAssertsAreAssumedLater) {
  logic::TermManager tm;
  auto x = tm.mk_const("x", logic::Sort::Int);
  auto a = tm.mk_le(tm.mk_int(1), x);
  auto b = tm.mk_lt(tm.mk_int(0), x);
  auto g = one_block({Command::assert_(a, ObligationKind::AssertStmt, {}, "a"), Command::assume(a),
                      Command::assert_(b, ObligationKind::AssertStmt, {}, "b")});
  auto vcs = compute_wp(g, tm);
  ASSERT_EQ(vcs.size(), 2u);
  EXPECT_EQ(vcs[0].goal, a);
  EXPECT_EQ(vcs[1].goal, tm.mk_implies(a, b));
}

TEST(Wp, BranchesAreSeparatePaths) {
  logic::TermManager tm;
  auto x = tm.mk_const("x", logic::Sort::Int);
  auto r = tm.mk_const("r", logic::Sort::Int);
  auto zero = tm.mk_int(0);
  ir::Graph g;
  g.name = "T";
  auto pos = tm.mk_lt(zero, x);
  g.blocks.push_back({"b0", {}, {1, 2}});
  g.blocks.push_back({"b1", {Command::assume(pos), Command::assign(r, x)}, {3}});
  g.blocks.push_back({"b2", {Command::assume(tm.mk_not(pos)), Command::assign(r, tm.mk_neg(x))}, {3}});
  g.blocks.push_back({"b3", {Command::assert_(tm.mk_le(zero, r), ObligationKind::Postcondition, {}, "p")}, {}});
  auto vcs = compute_wp(g, tm);
  ASSERT_EQ(vcs.size(), 1u);
  auto v = prover::prove(vcs[0], tm);
  EXPECT_EQ(v.kind, Verdict::Kind::Proved);
}

TEST(Vcgen, FeeWithIntChildrenIsInvalid) {
  Session s(corpus_file("fee_children_int.mdfy"));
  auto vcs = s.vcs(kCls + "CalculateEdiCastleVisitFee");
  ASSERT_EQ(vcs.size(), 1u);
  EXPECT_EQ(vcs[0].kind, ObligationKind::Postcondition);
  // Equivalent to numAdults >= 1 ==> 10 * numAdults + 6 * numChildren > 0
  // given the prelude numAdults >= 0.
  auto& tm = s.tm();
  auto a = tm.mk_const("numAdults", logic::Sort::Int);
  auto c = tm.mk_const("numChildren", logic::Sort::Int);
  auto expected = tm.mk_implies(
      tm.mk_le(tm.mk_int(1), a),
      tm.mk_lt(tm.mk_int(0), tm.mk_add(tm.mk_mul(tm.mk_int(10), a), tm.mk_mul(tm.mk_int(6), c))));
  VerificationCondition eq = vcs[0];
  eq.goal = tm.mk_iff(vcs[0].formula(tm), expected);
  eq.prelude.clear();
  EXPECT_EQ(prover::prove(eq, tm).kind, Verdict::Kind::Proved);
  EXPECT_EQ(prover::prove(vcs[0], tm).kind, Verdict::Kind::Counterexample);
}

TEST(Vcgen, NatPreludeMakesFeeValid) {
  Session s(corpus_file("appendix.mdfy"));
  auto vcs = s.vcs(kCls + "CalculateEdiCastleVisitFee");
  ASSERT_EQ(vcs.size(), 1u);
  auto& tm = s.tm();
  auto c = tm.mk_const("numChildren", logic::Sort::Int);
  bool has_nat_fact = false;
  for (auto p : vcs[0].prelude) has_nat_fact |= p == tm.mk_le(tm.mk_int(0), c);
  EXPECT_TRUE(has_nat_fact);
  EXPECT_EQ(prover::prove(vcs[0], tm).kind, Verdict::Kind::Proved);
}

TEST(Vcgen, ClosedFormulas) {
  // Free constants stand for universally quantified program state: each is
  // a program variable, a havoc or snapshot symbol, or a heap.
  Session s(corpus_file("appendix.mdfy"));
  for (const auto& g : s.graphs())
    for (const auto& vc : s.vcs(g.name))
      for (auto c : logic::free_consts(vc.formula(s.tm()))) {
        const std::string& n = c->name;
        bool ok = g.var_types.count(n) || n.find('@') != std::string::npos || n.rfind("$", 0) == 0;
        EXPECT_TRUE(ok) << g.name << " " << vc.id << " free " << n;
      }
}

TEST(Vcgen, GoldenObligations) {
  Session s(corpus_file("appendix.mdfy"));
  std::ostringstream os;
  for (const auto& g : s.graphs())
    for (const auto& vc : s.vcs(g.name))
      os << vc.method << ' ' << vc.id << ' ' << ir::kind_name(vc.kind) << ' ' << vc.span.start_line << ':'
         << vc.span.start_col << '\n';
  EXPECT_EQ(os.str(), testing::read_file(std::string(MINIDAFNY_GOLDEN_DIR) + "/appendix.obligations"));
}

TEST(Vcgen, IdsStableAcrossRuns) {
  std::vector<std::string> dumps;
  for (int k = 0; k < 2; ++k) {
    Session s(corpus_file("arrays.mdfy"));
    std::string text;
    for (const auto& g : s.graphs())
      for (const auto& vc : s.vcs(g.name)) text += dump(vc);
    dumps.push_back(text);
  }
  EXPECT_EQ(dumps[0], dumps[1]);
}

TEST(Vcgen, MethodCallsStayOpaque) {
  Session s(corpus_file("family_ticket_assert32.mdfy"));
  auto out = s.prove_all(kCls + "FamilyTicketVerification");
  std::map<int, Verdict::Kind> by_line;
  for (const auto& o : out)
    if (o.vc.kind == ObligationKind::AssertStmt) by_line[o.vc.span.start_line] = o.verdict.kind;
  EXPECT_EQ(by_line[29], Verdict::Kind::Proved);          // totalFee > 0
  EXPECT_EQ(by_line[30], Verdict::Kind::Counterexample);  // totalFee == 32
}

TEST(Vcgen, FunctionMethodsAreInlined) {
  Session s(corpus_file("appendix.mdfy"));
  for (const auto& o : s.prove_all(kCls + "FamilyTicketVerification"))
    EXPECT_EQ(o.verdict.kind, Verdict::Kind::Proved) << o.vc.id;
}

TEST(Vcgen, FuelZeroLeavesCallsUninterpreted) {
  Session s(corpus_file("appendix.mdfy"));
  std::map<int, Verdict::Kind> by_line;
  // On-demand unfolding in the prover would recover the body; keep it off.
  for (const auto& o : s.prove_all(kCls + "FamilyTicketVerification", 0, false))
    if (o.vc.kind == ObligationKind::AssertStmt) by_line[o.vc.span.start_line] = o.verdict.kind;
  EXPECT_EQ(by_line[29], Verdict::Kind::Proved);
  EXPECT_NE(by_line[33], Verdict::Kind::Proved);
  EXPECT_NE(by_line[36], Verdict::Kind::Proved);
}

TEST(Vcgen, InlineFunctionsRespectsFuel) {
  Session s("function method G(b: bool): nat { if b then 22 else 27 }\n"
            "method M() { assert G(false) == 27; }");
  auto& tm = s.tm();
  auto app = tm.mk_apply("G", logic::Sort::Int, {tm.mk_false()});
  auto atom = tm.mk_eq(app, tm.mk_int(27));
  const auto& defs = s.tr().functions();
  auto zero = inline_functions(atom, 0, defs, tm);
  auto two = inline_functions(atom, 2, defs, tm);
  // Without fuel only the nat result fact is available.
  EXPECT_NE(zero, two);
  VerificationCondition vc;
  vc.goal = two;
  EXPECT_EQ(prover::prove(vc, tm).kind, Verdict::Kind::Proved);
  vc.goal = zero;
  EXPECT_EQ(prover::prove(vc, tm).kind, Verdict::Kind::Counterexample);
}

TEST(Vcgen, QuantifiedInvariantCarriesFinalAssert) {
  Session with(corpus_file("appendix.mdfy"));
  for (const auto& o : with.prove_all(kCls + "VerifyAdults"))
    EXPECT_EQ(o.verdict.kind, Verdict::Kind::Proved) << o.vc.id << " " << ir::kind_name(o.vc.kind);
  Session without(corpus_file("verify_adults_no_forall_invariant.mdfy"));
  bool final_fails = false;
  for (const auto& o : without.prove_all(kCls + "VerifyAdults"))
    if (o.vc.kind == ObligationKind::AssertStmt)
      final_fails = o.verdict.kind == Verdict::Kind::Counterexample;
  EXPECT_TRUE(final_fails);
}

const char* kFact =
    "function Fact(n: nat): nat decreases n { if n == 0 then 1 else n * Fact(n - 1) }\n";

TEST(Termination, RecursiveFunctionWithMeasure) {
  Session s(kFact);
  ir::CallGraph cg(s.tp());
  std::vector<Diagnostic> diags;
  auto vcs = check_function_termination("Fact", s.tp(), s.tr(), cg, diags);
  EXPECT_TRUE(diags.empty());
  ASSERT_FALSE(vcs.empty());
  for (const auto& vc : vcs) {
    EXPECT_TRUE(vc.kind == ObligationKind::TerminationDecreases || vc.kind == ObligationKind::TerminationBounded);
    EXPECT_EQ(prover::prove(vc, s.tm()).kind, Verdict::Kind::Proved) << dump(vc);
  }
}

TEST(Termination, RecursiveFunctionWithoutMeasure) {
  Session s("function Fact(n: nat): nat { if n == 0 then 1 else n * Fact(n - 1) }\n");
  ASSERT_TRUE(s.typed());
  EXPECT_EQ(testing::codes_of(s.diagnostics()), std::vector<std::string>{codes::kNoTermination});
}

TEST(Termination, NonRecursiveHasNoVcs) {
  Session s(corpus_file("appendix.mdfy"));
  ir::CallGraph cg(s.tp());
  std::vector<Diagnostic> diags;
  auto vcs = check_function_termination(kCls + "GetDiscountedFamilyTicket", s.tp(), s.tr(), cg, diags);
  EXPECT_TRUE(vcs.empty());
  EXPECT_TRUE(diags.empty());
}

TEST(Termination, BadMeasureFails) {
  Session s("function F(n: nat): nat decreases n { if n == 0 then 0 else F(n) }\n");
  ir::CallGraph cg(s.tp());
  std::vector<Diagnostic> diags;
  auto vcs = check_function_termination("F", s.tp(), s.tr(), cg, diags);
  bool failed = false;
  for (const auto& vc : vcs) failed |= prover::prove(vc, s.tm()).kind == Verdict::Kind::Counterexample;
  EXPECT_TRUE(failed);
}

TEST(Termination, RecursiveMethod) {
  Session s(corpus_file("arith.mdfy"));
  for (const auto& o : s.prove_all("CountDown"))
    EXPECT_EQ(o.verdict.kind, Verdict::Kind::Proved) << o.vc.id << " " << ir::kind_name(o.vc.kind);
}

}  // namespace
}  // namespace minidafny::vcgen
