#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "minidafny/driver/driver.hpp"
#include "session.hpp"

namespace minidafny::driver {
namespace {

namespace fs = std::filesystem;

Report report_for(const std::string& source, const std::string& path, RunConfig cfg = {}) {
  Report r;
  int exit = exit_code::kOk;
  r.files.push_back(verify_source(source, path, cfg, exit));
  r.exit_code = exit;
  for (const auto& m : r.files.back().methods)
    for (const auto& vc : m.vcs) {
      if (vc.verdict == prover::Verdict::Kind::Proved) ++r.summary.proved;
      else if (vc.verdict == prover::Verdict::Kind::Counterexample) ++r.summary.failed;
      else ++r.summary.unknown;
    }
  for (const auto& d : r.files.back().diagnostics)
    if (d.severity == Severity::Error) ++r.summary.errors;
  return r;
}

int exit_of(const std::string& source, RunConfig cfg = {}) {
  int exit = exit_code::kOk;
  verify_source(source, "t.mdfy", cfg, exit);
  return exit;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("minidafny-driver-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream((path / name).string(), std::ios::binary) << text;
    return (path / name).string();
  }
};

TEST(Driver, ExitCodePrecedence) {
  using namespace exit_code;
  EXPECT_EQ(combine_exit(kOk, kVerificationFailed), kVerificationFailed);
  EXPECT_EQ(combine_exit(kInputErrors, kVerificationFailed), kInputErrors);
  EXPECT_EQ(combine_exit(kInputErrors, kSolverFailure), kSolverFailure);
  EXPECT_EQ(combine_exit(kSolverFailure, kInternal), kInternal);
  EXPECT_EQ(combine_exit(kInternal, kOk), kInternal);
}

TEST(Driver, ExitCodes) {
  EXPECT_EQ(exit_of("method M(x: int) requires x > 0; ensures x >= 1; { }"), exit_code::kOk);
  EXPECT_EQ(exit_of("method M(x: int) ensures x >= 1; { }"), exit_code::kVerificationFailed);
  EXPECT_EQ(exit_of("method M( { }"), exit_code::kInputErrors);
  EXPECT_EQ(exit_of("method M() { x := 1; }"), exit_code::kInputErrors);

  RunConfig smt;
  smt.backend = Backend::SmtLib;
  EXPECT_EQ(exit_of("method M(x: int) ensures x >= 1; { }", smt), exit_code::kSolverFailure);
  smt.solver_command = "/bin/false";
  EXPECT_EQ(exit_of("method M(x: int) ensures x >= 1; { }", smt), exit_code::kSolverFailure);
}

TEST(Driver, HumanFormatGolden) {
  auto r = report_for(testing::corpus_file("fee_children_int.mdfy"), "fee_children_int.mdfy");
  std::string text = to_human(r);
  std::string golden = std::string(MINIDAFNY_GOLDEN_DIR) + "/fee_children_int.human";
  if (std::getenv("MINIDAFNY_UPDATE_GOLDEN")) std::ofstream(golden, std::ios::binary) << text;
  else EXPECT_EQ(text, testing::read_file(golden));
  EXPECT_EQ(r.exit_code, exit_code::kVerificationFailed);
}

TEST(Driver, HumanLinesHaveLocationPrefix) {
  const std::regex line(R"(^[^:]+:\d+:\d+: (error|warning|note)\[[A-Z_]+\]: .+$)");
  for (const char* f : {"fee_children_int.mdfy", "child_present_no_reads.mdfy",
                        "verify_adults_no_forall_invariant.mdfy", "audio_guides_no_invariant.mdfy"}) {
    auto r = report_for(testing::corpus_file(f), f);
    std::istringstream in(to_human(r));
    std::string l;
    int n = 0;
    while (std::getline(in, l)) {
      EXPECT_TRUE(std::regex_match(l, line)) << f << ": " << l;
      ++n;
    }
    EXPECT_GT(n, 0) << f;
  }
}

TEST(Driver, ReadsMessageText) {
  auto r = report_for(testing::corpus_file("child_present_no_reads.mdfy"), "c.mdfy");
  int reads = 0;
  for (const auto& d : r.files[0].diagnostics)
    if (d.code == "READS_VIOLATION") {
      EXPECT_EQ(d.message, "insufficient reads clause to read array element");
      ++reads;
    }
  EXPECT_EQ(reads, 2);
  EXPECT_EQ(r.exit_code, exit_code::kInputErrors);
}

TEST(Driver, JsonSchemaAndDeterminism) {
  auto src = testing::corpus_file("appendix.mdfy");
  std::string a = to_json(report_for(src, "appendix.mdfy"));
  std::string b = to_json(report_for(src, "appendix.mdfy"));
  EXPECT_EQ(a, b);

  auto j = nlohmann::json::parse(a);
  EXPECT_EQ(j.at("version"), kReportVersion);
  for (const char* k : {"errors", "failed", "proved", "unknown"}) EXPECT_TRUE(j.at("summary").contains(k)) << k;
  const auto& file = j.at("files").at(0);
  EXPECT_EQ(file.at("path"), "appendix.mdfy");
  EXPECT_TRUE(file.at("diagnostics").is_array());
  int vcs = 0;
  for (const auto& m : file.at("methods")) {
    EXPECT_TRUE(m.at("name").is_string());
    for (const auto& vc : m.at("vcs")) {
      for (const char* k : {"id", "kind", "line", "col", "message", "verdict"})
        EXPECT_TRUE(vc.contains(k)) << k;
      EXPECT_EQ(vc.at("verdict"), "proved");
      ++vcs;
    }
  }
  EXPECT_EQ(vcs, 34);
  EXPECT_EQ(j.at("summary").at("proved"), 34);
}

TEST(Driver, JsonCounterexampleAndReplay) {
  RunConfig cfg;
  cfg.replay = true;
  auto j = nlohmann::json::parse(
      to_json(report_for(testing::corpus_file("fee_children_int.mdfy"), "f.mdfy", cfg)));
  bool seen = false;
  for (const auto& m : j.at("files").at(0).at("methods"))
    for (const auto& vc : m.at("vcs"))
      if (vc.at("verdict") == "counterexample") {
        EXPECT_EQ(vc.at("line"), 8);
        EXPECT_EQ(vc.at("counterexample").at("numChildren"), -2);
        ASSERT_TRUE(vc.contains("replay"));
        seen = true;
      }
  EXPECT_TRUE(seen);
}

TEST(Driver, UnknownCarriesReason) {
  // An assumed forall-exists needs a skolem function, outside the fragment.
  auto r = report_for("method M(x: int) requires forall i :: exists j :: j > i; ensures x > 0; { }", "u.mdfy");
  ASSERT_EQ(r.files[0].methods.size(), 1u);
  ASSERT_EQ(r.files[0].methods[0].vcs.size(), 1u);
  const auto& vc = r.files[0].methods[0].vcs[0];
  EXPECT_EQ(vc.verdict, prover::Verdict::Kind::Unknown);
  EXPECT_EQ(vc.reason, prover::reason::kUnsupported);
  EXPECT_NE(to_human(r).find("(could not be decided: unsupported-fragment)"), std::string::npos);
  EXPECT_EQ(r.exit_code, exit_code::kVerificationFailed);
}

TEST(Driver, EmitGcIsDebugOutput) {
  RunConfig cfg;
  cfg.emit_gc = true;
  int exit = 0;
  auto f = verify_source(testing::corpus_file("appendix.mdfy"), "appendix.mdfy", cfg, exit);
  EXPECT_EQ(f.debug, testing::read_file(std::string(MINIDAFNY_GOLDEN_DIR) + "/appendix.gc"));
}

TEST(Corpus, EmptyManifest) {
  TempDir d;
  std::ostringstream out;
  EXPECT_EQ(run_corpus(d.write("m.json", R"({"entries": []})"), out), 0);
  EXPECT_EQ(out.str(), "");
}

TEST(Corpus, MismatchesAreReported) {
  TempDir d;
  d.write("ok.mdfy", "method M(x: int) requires x > 0; ensures x >= 1; { }");
  d.write("bad.mdfy", "method M(x: int) ensures x >= 1; { }");
  std::ostringstream out;
  auto manifest = d.write("m.json", R"({"entries": [
    {"file": "ok.mdfy", "exit": 0, "diagnostics": []},
    {"file": "bad.mdfy", "exit": 0, "diagnostics": []}
  ]})");
  EXPECT_EQ(run_corpus(manifest, out), 1);
  std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1) << text;
  EXPECT_NE(text.find("bad.mdfy"), std::string::npos);

  std::ostringstream out2;
  auto fixed = d.write("m2.json", R"({"entries": [
    {"file": "bad.mdfy", "exit": 1, "diagnostics": [{"code": "POSTCONDITION", "line": 1, "col": 26}]}
  ]})");
  EXPECT_EQ(run_corpus(fixed, out2), 0) << out2.str();
}

TEST(Corpus, MissingFileIsMismatch) {
  TempDir d;
  std::ostringstream out;
  auto manifest = d.write("m.json", R"({"entries": [{"file": "nope.mdfy", "exit": 0, "diagnostics": []}]})");
  EXPECT_NE(run_corpus(manifest, out), 0);
  EXPECT_NE(out.str().find("nope.mdfy"), std::string::npos);
}

TEST(Corpus, ShippedManifestMatches) {
  std::ostringstream out;
  EXPECT_EQ(run_corpus(testing::corpus_dir() + "/manifest.json", out), 0) << out.str();
}

// Runs the CLI and returns {exit status, stdout}.
std::pair<int, std::string> run_cli(const std::string& args) {
  std::string cmd = std::string(MINIDAFNY_BINARY) + " " + args + " 2>/dev/null";
  std::string out;
  FILE* p = ::popen(cmd.c_str(), "r");
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  int status = ::pclose(p);
  return {WEXITSTATUS(status), out};
}

TEST(Cli, ExitCodesAndOutput) {
  std::string dir = testing::corpus_dir();
  EXPECT_EQ(run_cli("verify " + dir + "/appendix.mdfy").first, 0);
  auto [rc, out] = run_cli("verify " + dir + "/fee_children_int.mdfy");
  EXPECT_EQ(rc, 1);
  EXPECT_NE(out.find(":8:11: error[POSTCONDITION]"), std::string::npos) << out;
  EXPECT_EQ(run_cli("verify " + dir + "/child_present_no_reads.mdfy").first, 2);
  EXPECT_EQ(run_cli("verify /nonexistent/file.mdfy").first, 2);
  EXPECT_EQ(run_cli("verify --backend smtlib " + dir + "/fee_children_int.mdfy").first, 4);
  // Input errors in one file and failures in another: the higher code wins.
  EXPECT_EQ(run_cli("verify " + dir + "/fee_children_int.mdfy " + dir + "/child_present_no_reads.mdfy").first, 2);
}

TEST(Cli, JsonIsParseable) {
  auto [rc, out] = run_cli("verify --json " + testing::corpus_dir() + "/fee_children_int.mdfy");
  EXPECT_EQ(rc, 1);
  auto j = nlohmann::json::parse(out);
  EXPECT_EQ(j.at("summary").at("failed"), 1);
}

TEST(Cli, EmitSmtWritesOneFilePerVc) {
  TempDir d;
  auto [rc, out] = run_cli("verify --emit-smt " + d.path.string() + " " + testing::corpus_dir() + "/appendix.mdfy");
  EXPECT_EQ(rc, 0);
  int n = 0;
  for (const auto& e : fs::directory_iterator(d.path))
    if (e.path().extension() == ".smt2") ++n;
  EXPECT_EQ(n, 34);
}

}  // namespace
}  // namespace minidafny::driver
