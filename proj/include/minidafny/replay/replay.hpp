#pragma once

#include <string>

#include "minidafny/diagnostic.hpp"
#include "minidafny/ir/gc.hpp"
#include "minidafny/prover/model.hpp"
#include "minidafny/typecheck/checker.hpp"

namespace minidafny::replay {

/// The obligation a counterexample claims to violate.
struct Target {
  ir::ObligationKind kind = ir::ObligationKind::AssertStmt;
  Span span;
};

struct Outcome {
  enum class Kind { Confirmed, NotReproduced, StepLimit };
  Kind kind = Kind::NotReproduced;
  ir::ObligationKind obligation = ir::ObligationKind::AssertStmt;  // Confirmed only
  Span span;                                                       // Confirmed only
  std::string detail;
};

struct ReplayOptions {
  long step_cap = 1000000;  // statements, function calls and quantifier instances
  int call_depth_cap = 2000;
};

/// Runs declaration `decl` (a method or function) from the state described
/// by `model` and reports whether the target obligation fails at its span.
///
/// In-parameters must be present in the model. Locals without initializer,
/// outputs of called methods and loop-havocked variables take the model
/// values of their havoc symbols (`x@<site>`) when present, else type
/// defaults. A loop whose havoc symbols occur in the model is entered in the
/// havocked state and its body is run once; other loops run concretely.
/// Called methods are not executed: their contracts are checked and assumed.
Outcome replay(const typecheck::TypedProgram& tp, const std::string& decl,
               const prover::Model& model, const Target& target, const ReplayOptions& opts = {});

/// Copy of `model` where in-parameters of `decl` absent from it get the
/// default value of their type. Absent means unconstrained by the VC, so any
/// value is as good as another.
prover::Model with_input_defaults(const typecheck::TypedProgram& tp, const std::string& decl,
                                  const prover::Model& model);

/// `confirmed`, `not reproduced: <detail>`, `step limit`.
std::string to_string(const Outcome& o);
std::string_view kind_name(Outcome::Kind k);

}  // namespace minidafny::replay
