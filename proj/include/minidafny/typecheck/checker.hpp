#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "minidafny/frontend/ast.hpp"

namespace minidafny::typecheck {

/// A resolved program: every expression carries a Type, every identifier a
/// SymbolKind, and every call the qualified name of its callee. Method calls
/// used as a statement right-hand side have been rewritten into
/// MultiAssignCall statements.
class TypedProgram {
 public:
  explicit TypedProgram(std::unique_ptr<frontend::Program> program);

  const frontend::Program& program() const { return *program_; }

  const frontend::MethodDecl* method(const std::string& qualified) const;
  const frontend::FunctionDecl* function(const std::string& qualified) const;

  const std::map<std::string, const frontend::MethodDecl*>& methods() const { return methods_; }
  const std::map<std::string, const frontend::FunctionDecl*>& functions() const {
    return functions_;
  }

 private:
  std::unique_ptr<frontend::Program> program_;
  std::map<std::string, const frontend::MethodDecl*> methods_;
  std::map<std::string, const frontend::FunctionDecl*> functions_;
};

struct CheckResult {
  std::optional<TypedProgram> typed;  // absent when any error was reported
  std::vector<Diagnostic> diagnostics;  // errors and warnings
};

/// Name resolution and type checking. `nat` is a refinement of `int`: an
/// int-typed value may flow into a nat slot (the verifier proves it
/// non-negative).
CheckResult resolve_and_check(frontend::Program program);

/// Ghost-usage rules: plain functions and ghost locals may only appear in
/// specification positions.
std::vector<Diagnostic> check_ghost_usage(const TypedProgram& tp);

/// Syntactic frame checks: functions read only arrays in their `reads`
/// clause; methods write only arrays in their `modifies` clause, and callees'
/// `modifies` clauses (mapped through the arguments) stay inside the caller's.
/// Membership is by parameter name; no semantic reasoning is involved.
std::vector<Diagnostic> check_frames(const TypedProgram& tp);

}  // namespace minidafny::typecheck
