#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "minidafny/driver/driver.hpp"

using namespace minidafny;

int main(int argc, char** argv) {
  CLI::App app{"minidafny: verifier for a small contract-annotated language"};
  app.require_subcommand(1);

  driver::RunConfig cfg;
  std::string backend = "builtin";
  std::string solver;
  std::string emit_smt;
  auto* verify = app.add_subcommand("verify", "verify source files");
  verify->add_option("files", cfg.inputs, "input files")->required();
  verify->add_option("--backend", backend, "builtin or smtlib")
      ->check(CLI::IsMember({"builtin", "smtlib"}));
  verify->add_option("--solver-cmd", solver, "external solver command (smtlib backend)");
  verify->add_option("--timeout", cfg.timeout_ms, "per-VC timeout in milliseconds")
      ->check(CLI::PositiveNumber);
  verify->add_option("--fuel", cfg.fuel, "function unfolding depth")->check(CLI::NonNegativeNumber);
  verify->add_option("--rounds", cfg.rounds, "quantifier instantiation rounds")
      ->check(CLI::NonNegativeNumber);
  verify->add_option("--emit-smt", emit_smt, "write one SMT-LIB script per VC into DIR");
  verify->add_flag("--emit-gc", cfg.emit_gc, "print the guarded-command graphs");
  verify->add_flag("--emit-vc", cfg.emit_vc, "print the verification conditions");
  verify->add_flag("--replay", cfg.replay, "replay every counterexample");
  verify->add_flag("--json", cfg.json, "print a JSON report");

  std::string manifest;
  auto* corpus = app.add_subcommand("corpus", "check a corpus manifest");
  corpus->add_option("manifest", manifest, "manifest JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : driver::exit_code::kInputErrors;
  }

  if (*corpus) return driver::run_corpus(manifest, std::cout);

  if (!solver.empty()) cfg.solver_command = solver;
  else if (const char* env = std::getenv("MINIDAFNY_SOLVER"); env && *env) cfg.solver_command = env;
  if (!emit_smt.empty()) cfg.emit_smt_dir = emit_smt;
  if (backend == "smtlib") {
    cfg.backend = driver::Backend::SmtLib;
    if (!cfg.solver_command) {
      std::cerr << "error: --backend smtlib needs --solver-cmd or MINIDAFNY_SOLVER\n";
      return driver::exit_code::kSolverFailure;
    }
  }

  try {
    driver::Report rep = driver::verify(cfg);
    for (const auto& f : rep.files) (cfg.json ? std::cerr : std::cout) << f.debug;
    if (cfg.json) {
      std::cout << driver::to_json(rep);
    } else {
      std::cout << driver::to_human(rep);
      const auto& s = rep.summary;
      std::cerr << "minidafny: " << s.proved << " proved, " << s.failed << " failed, " << s.unknown
                << " unknown, " << s.errors << " errors\n";
    }
    return rep.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return driver::exit_code::kInternal;
  }
}
