#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "minidafny/ir/gc.hpp"
#include "minidafny/ir/translate.hpp"

namespace minidafny::ir {

/// Declaration-level call graph (methods call methods; functions and methods
/// call functions) with strongly connected components.
class CallGraph {
 public:
  explicit CallGraph(const typecheck::TypedProgram& tp);

  /// True when a call from `caller` to `callee` closes a cycle.
  bool recursive(const std::string& caller, const std::string& callee) const;
  bool in_cycle(const std::string& decl) const;
  const std::set<std::string>& callees(const std::string& decl) const;

 private:
  std::map<std::string, std::set<std::string>> edges_;
  std::map<std::string, int> component_;
  std::set<std::string> cyclic_;
};

/// Termination measure for a loop without a `decreases` clause: `B - A` for
/// guards `A < B` / `A <= B`, `A - B` for `A > B` / `A >= B`, otherwise none.
std::optional<frontend::ExprPtr> guess_decreases(const frontend::While& loop);

/// Text of the termination diagnostic for loops with no usable measure.
inline constexpr const char* kNoMeasureMessage =
    "cannot prove termination; add a decreases clause";

Graph lower_method(const frontend::MethodDecl& m, Translator& tr, const CallGraph& cg,
                   const typecheck::TypedProgram& tp, std::vector<Diagnostic>& diags);

/// Functions are lowered to a graph that checks well-formedness of the
/// contract and body, defines the function by its body, and asserts each
/// ensures clause.
Graph lower_function(const frontend::FunctionDecl& f, Translator& tr, const CallGraph& cg,
                     const typecheck::TypedProgram& tp, std::vector<Diagnostic>& diags);

struct LoweredProgram {
  std::vector<Graph> graphs;  // declaration order
  std::vector<Diagnostic> diagnostics;
};

LoweredProgram lower_program(const typecheck::TypedProgram& tp, Translator& tr);

}  // namespace minidafny::ir
