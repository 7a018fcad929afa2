#pragma once

#include <chrono>
#include <optional>
#include <string>

#include "minidafny/prover/prover.hpp"

namespace minidafny::prover {

/// SMT-LIB2 script asserting the negation of `vc`. Refs are Int with null as
/// 0; heaps are `(Array Int (Array Int Int))` (Bool elements for `$heapb`);
/// lengths live in the map `$len`. Output is deterministic: declarations are
/// sorted by symbol.
std::string emit_smtlib(const vcgen::VerificationCondition& vc, logic::TermManager& tm);

/// Parses the `(model ...)` / `((define-fun ...))` answer of get-model and
/// reads back the values of `consts` (heaps are sampled at every index below
/// the length of every Ref value). Returns nullopt when the text cannot be
/// interpreted.
std::optional<Model> parse_smt_model(const std::string& text, const std::vector<logic::TermRef>& consts);

struct ExternalResult {
  Verdict verdict;
  bool solver_failed = false;  // could not run, or first token not sat/unsat/unknown
  std::string message;         // failure detail or model warning
};

/// Writes the script to `script_path` and runs `/bin/sh -c "<solver_command> <script_path>"`.
ExternalResult run_external(const vcgen::VerificationCondition& vc, logic::TermManager& tm,
                            const std::string& solver_command, const std::string& script_path,
                            std::chrono::milliseconds timeout = std::chrono::milliseconds(30000));

/// Quotes `s` as an SMT-LIB symbol when it is not a legal simple symbol.
std::string smt_symbol(const std::string& s);

}  // namespace minidafny::prover
