#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

#include "minidafny/driver/driver.hpp"
#include "minidafny/prover/smtlib.hpp"
#include "minidafny/replay/replay.hpp"
#include "mutants.hpp"
#include "oracle.hpp"
#include "session.hpp"

namespace minidafny::testing {
namespace {

namespace fs = std::filesystem;
using prover::Verdict;

std::vector<std::string> corpus_files() {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(corpus_dir()))
    if (e.path().extension() == ".mdfy") out.push_back(e.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

TEST(CorpusProperties, CounterexampleCoresHoldUnderOracle) {
  int checked = 0;
  for (const auto& f : corpus_files()) {
    Session s(corpus_file(f), f);
    if (!s.typed()) continue;
    for (const auto& g : s.graphs())
      for (const auto& o : s.prove_all(g.name)) {
        if (o.verdict.kind != Verdict::Kind::Counterexample) continue;
        ASSERT_FALSE(o.verdict.ground_core.empty());
        for (auto c : o.verdict.ground_core) {
          auto h = oracle_holds(c, o.verdict.model);
          // Terms the oracle cannot evaluate are skipped, not trusted.
          if (!h) continue;
          EXPECT_TRUE(*h) << f << " " << g.name << " " << o.vc.id << ": " << logic::to_string(c);
        }
        ++checked;
      }
  }
  EXPECT_EQ(checked, 8);  // failing obligations across the shipped corpus
}

TEST(CorpusProperties, CounterexamplesReplay) {
  int confirmed = 0;
  for (const auto& f : corpus_files()) {
    Session s(corpus_file(f), f);
    if (!s.typed()) continue;
    for (const auto& g : s.graphs())
      for (const auto& o : s.prove_all(g.name)) {
        if (o.verdict.kind != Verdict::Kind::Counterexample) continue;
        auto model = replay::with_input_defaults(s.tp(), g.name, o.verdict.model);
        auto r = replay::replay(s.tp(), g.name, model, {o.vc.kind, o.vc.span});
        EXPECT_EQ(r.kind, replay::Outcome::Kind::Confirmed)
            << f << " " << g.name << " " << o.vc.description << ": " << replay::to_string(r);
        ++confirmed;
      }
  }
  EXPECT_EQ(confirmed, 8);
}

TEST(CorpusProperties, ReportsAreByteIdentical) {
  driver::RunConfig cfg;
  cfg.replay = true;
  for (const auto& f : corpus_files()) cfg.inputs.push_back(corpus_dir() + "/" + f);
  auto a = driver::to_json(driver::verify(cfg));
  auto b = driver::to_json(driver::verify(cfg));
  EXPECT_EQ(a, b);
  EXPECT_EQ(driver::to_human(driver::verify(cfg)), driver::to_human(driver::verify(cfg)));
}

bool have_z3() { return std::system("command -v z3 >/dev/null 2>&1") == 0; }

TEST(CorpusProperties, BuiltinAgreesWithZ3) {
  if (!have_z3()) GTEST_SKIP() << "z3 not installed";
  auto dir = fs::temp_directory_path() / ("minidafny-z3-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  int compared = 0;
  for (const auto& f : corpus_files()) {
    Session s(corpus_file(f), f);
    if (!s.typed()) continue;
    for (const auto& g : s.graphs())
      for (const auto& o : s.prove_all(g.name)) {
        if (o.verdict.kind == Verdict::Kind::Unknown) continue;
        auto ext = prover::run_external(o.vc, s.tm(), "z3", (dir / "q.smt2").string());
        ASSERT_FALSE(ext.solver_failed) << ext.message;
        if (ext.verdict.kind == Verdict::Kind::Unknown) continue;
        EXPECT_EQ(o.verdict.kind, ext.verdict.kind) << f << " " << g.name << " " << o.vc.description;
        ++compared;
      }
  }
  fs::remove_all(dir);
  EXPECT_GE(compared, 100);
}

// Every counterexample found on a weakened contract must replay to the
// reported failure, and no proved obligation may replay to one.
TEST(Mutation, CounterexamplesConfirmedAndProofsNotRefuted) {
  int mutants = 0;
  int refuted = 0;
  int proved_checked = 0;
  int core_checked = 0;
  for (const char* f : {"appendix.mdfy", "arith.mdfy", "arrays.mdfy"}) {
    for (const auto& mu : contract_mutants(corpus_file(f), f)) {
      Session s(mu.source, f);
      if (!s.typed()) continue;
      ++mutants;
      for (const auto& g : s.graphs())
        for (const auto& o : s.prove_all(g.name)) {
          replay::Target target{o.vc.kind, o.vc.span};
          if (o.verdict.kind == Verdict::Kind::Counterexample) {
            auto model = replay::with_input_defaults(s.tp(), g.name, o.verdict.model);
            auto r = replay::replay(s.tp(), g.name, model, target);
            EXPECT_EQ(r.kind, replay::Outcome::Kind::Confirmed)
                << mu.description << " / " << o.vc.description << ": " << replay::to_string(r);
            ++refuted;
            for (auto c : o.verdict.ground_core)
              if (auto h = oracle_holds(c, o.verdict.model)) {
                EXPECT_TRUE(*h) << mu.description << ": " << logic::to_string(c);
                ++core_checked;
              }
          } else if (o.verdict.kind == Verdict::Kind::Proved) {
            auto model = replay::with_input_defaults(s.tp(), g.name, {});
            auto r = replay::replay(s.tp(), g.name, model, target);
            EXPECT_NE(r.kind, replay::Outcome::Kind::Confirmed) << mu.description << " / " << o.vc.description;
            ++proved_checked;
          }
        }
    }
  }
  EXPECT_GE(mutants, 50);
  EXPECT_GE(refuted, 30);
  EXPECT_GT(proved_checked, 0);
  EXPECT_GT(core_checked, refuted);
}

}  // namespace
}  // namespace minidafny::testing
