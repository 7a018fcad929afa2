#pragma once

#include <string>
#include <vector>

#include "minidafny/logic/term.hpp"
#include "minidafny/prover/model.hpp"
#include "minidafny/prover/omega.hpp"

namespace minidafny::prover {

struct GroundResult {
  enum class Status { Sat, Unsat, Unknown };
  Status status = Status::Unknown;
  Model model;         // Sat only: satisfies every input formula
  std::string reason;  // Unknown only
};

struct GroundOptions {
  Clock::time_point deadline = Clock::time_point::max();
  bool minimize = true;
};

/// Satisfiability of a conjunction of quantifier-free formulas over Bool,
/// linear integer arithmetic, heaps and uninterpreted applications.
///
/// Reads over writes are expanded into case splits, applications, selects
/// and lengths become fresh variables constrained pairwise for functional
/// consistency, and the result is solved by CDCL with the Omega test as
/// theory. Products of two non-constant terms and division by a non-constant
/// are abstracted the same way; when the resulting model does not satisfy
/// the input under the real semantics the answer is Unknown.
GroundResult decide_ground(const std::vector<logic::TermRef>& formulas, logic::TermManager& tm,
                           const GroundOptions& opts = {});

}  // namespace minidafny::prover
