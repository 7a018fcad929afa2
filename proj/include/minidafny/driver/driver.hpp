#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "minidafny/diagnostic.hpp"
#include "minidafny/ir/gc.hpp"
#include "minidafny/prover/prover.hpp"
#include "minidafny/replay/replay.hpp"

namespace minidafny::driver {

enum class Backend { Builtin, SmtLib };

struct RunConfig {
  std::vector<std::string> inputs;
  Backend backend = Backend::Builtin;
  std::optional<std::string> solver_command;  // required for SmtLib
  int timeout_ms = 10000;
  int fuel = 2;
  int rounds = 3;
  std::optional<std::string> emit_smt_dir;  // one `<method>.<vcid>.smt2` per VC
  bool emit_gc = false;
  bool emit_vc = false;
  bool replay = false;
  bool json = false;
};

/// Exit codes, in precedence order 3 > 4 > 2 > 1 > 0.
namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kVerificationFailed = 1;
inline constexpr int kInputErrors = 2;
inline constexpr int kInternal = 3;
inline constexpr int kSolverFailure = 4;
}  // namespace exit_code

/// The more severe of two exit codes.
int combine_exit(int a, int b);

struct VcResult {
  std::string id;
  ir::ObligationKind kind;
  Span span;
  std::string message;
  prover::Verdict::Kind verdict = prover::Verdict::Kind::Unknown;
  std::string reason;                       // Unknown only
  std::vector<std::string> counterexample;  // `name = value` lines
  prover::Model model;                      // Counterexample only
  std::vector<std::string> model_names;     // variables shown from `model`
  std::optional<replay::Outcome> replay;
};

struct MethodResult {
  std::string name;
  std::vector<VcResult> vcs;
};

struct FileResult {
  std::string path;
  std::vector<MethodResult> methods;
  std::vector<Diagnostic> diagnostics;  // source order
  std::string debug;                    // --emit-gc / --emit-vc text
};

struct Summary {
  int proved = 0;
  int failed = 0;
  int unknown = 0;
  int errors = 0;  // error diagnostics
};

struct Report {
  std::vector<FileResult> files;
  Summary summary;
  int exit_code = exit_code::kOk;
};

inline constexpr int kReportVersion = 1;

Report verify(const RunConfig& cfg);

/// Verifies one in-memory source; `path` is used for spans and the report.
FileResult verify_source(const std::string& source, const std::string& path, const RunConfig& cfg,
                         int& exit_code);

/// `file:line:col: severity[CODE]: message` lines for diagnostics and failed
/// VCs, with counterexample and replay notes, in source order per file.
std::string to_human(const Report& r);

/// Deterministic JSON (sorted keys, two-space indent).
std::string to_json(const Report& r);

/// Runs every manifest entry and prints one line per mismatching entry.
/// Returns 0 iff all entries match.
int run_corpus(const std::string& manifest_path, std::ostream& out, const RunConfig& base = {});

}  // namespace minidafny::driver
