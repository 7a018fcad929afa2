#include <gtest/gtest.h>

#include "minidafny/prover/prover.hpp"
#include "oracle.hpp"

namespace minidafny::testing {
namespace {

using prover::Verdict;

struct Tally {
  int proved = 0;
  int refuted = 0;
};

// Proves `goal`, then checks the verdict against exhaustive search of the
// box [-r, r]^n. A refutation must come with a model that falsifies `goal`.
void check_against_search(logic::TermManager& tm, logic::TermRef goal, const std::vector<logic::TermRef>& vars,
                          std::int64_t r, Tally& t) {
  vcgen::VerificationCondition vc;
  vc.id = "vc1";
  vc.goal = goal;
  Verdict v = prover::prove(vc, tm);
  auto violation = brute_force_sat(tm.mk_not(goal), vars, -r, r);
  ASSERT_NE(v.kind, Verdict::Kind::Unknown) << v.reason << " on " << logic::to_string(goal);
  if (v.kind == Verdict::Kind::Proved) {
    EXPECT_FALSE(violation) << "proved but violated: " << logic::to_string(goal);
    ++t.proved;
    return;
  }
  prover::Model m = v.model;
  // Variables the model leaves out are unconstrained.
  for (auto x : vars) m.ints.emplace(x->name, 0);
  auto holds = oracle_holds(goal, m);
  ASSERT_TRUE(holds) << logic::to_string(goal);
  EXPECT_FALSE(*holds) << "model does not falsify " << logic::to_string(goal);
  ++t.refuted;
}

TEST(LiaOracle, FourVariablesAgainstExhaustiveSearch) {
  logic::TermManager tm;
  std::vector<logic::TermRef> vars;
  for (const char* n : {"a", "b", "c", "d"}) vars.push_back(tm.mk_const(n, logic::Sort::Int));
  std::mt19937_64 rng(20240601);
  Tally t;
  for (int round = 0; round < 600; ++round) {
    auto f = random_lia(tm, rng, vars, 3);
    check_against_search(tm, f, vars, 8, t);
    if (HasFatalFailure()) return;
  }
  // Both outcomes must be exercised for the run to mean anything.
  EXPECT_GT(t.proved, 30);
  EXPECT_GT(t.refuted, 30);
}

TEST(LiaOracle, ValidImplicationsFromConjunctions) {
  // Goals of the form A ==> A || B and A && B ==> A are valid by
  // construction and must always be proved.
  logic::TermManager tm;
  std::vector<logic::TermRef> vars;
  for (const char* n : {"p", "q", "r"}) vars.push_back(tm.mk_const(n, logic::Sort::Int));
  std::mt19937_64 rng(99);
  for (int round = 0; round < 200; ++round) {
    auto a = random_lia(tm, rng, vars, 2);
    auto b = random_lia(tm, rng, vars, 2);
    vcgen::VerificationCondition vc;
    vc.goal = round % 2 ? tm.mk_implies(a, tm.mk_or({a, b})) : tm.mk_implies(tm.mk_and({a, b}), a);
    EXPECT_EQ(prover::prove(vc, tm).kind, Verdict::Kind::Proved) << logic::to_string(vc.goal);
  }
}

TEST(LiaOracle, SixVariablesAgainstExhaustiveSearch) {
  logic::TermManager tm;
  std::vector<logic::TermRef> vars;
  for (const char* n : {"u", "v", "w", "x", "y", "z"}) vars.push_back(tm.mk_const(n, logic::Sort::Int));
  std::mt19937_64 rng(7);
  Tally t;
  for (int round = 0; round < 150; ++round) {
    auto f = random_lia(tm, rng, vars, 3);
    check_against_search(tm, f, vars, 2, t);
    if (HasFatalFailure()) return;
  }
  EXPECT_GT(t.proved + t.refuted, 0);
}

}  // namespace
}  // namespace minidafny::testing
