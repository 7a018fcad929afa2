#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "minidafny/ir/gc.hpp"
#include "minidafny/ir/lower.hpp"
#include "minidafny/ir/translate.hpp"

namespace minidafny::vcgen {

using logic::TermManager;
using logic::TermRef;

/// One proof obligation. The VC is `prelude ==> goal`, universally closed
/// over its free constants.
struct VerificationCondition {
  std::string id;      // `vc<k>`, 1-based in (line, col, kind) order per declaration
  std::string method;  // qualified declaration name
  ir::ObligationKind kind;
  Span span;
  std::string description;
  std::vector<TermRef> prelude;  // typing facts for the free constants
  TermRef goal = nullptr;

  TermRef formula(TermManager& tm) const;
};

struct VcOptions {
  int fuel = 2;
};

/// Weakest preconditions: one VC per Assert command, with the path context of
/// the assert folded in. Function applications are left uninterpreted.
std::vector<VerificationCondition> compute_wp(const ir::Graph& g, TermManager& tm);

/// Adds definitional facts for every function application in `f`: each atom
/// `A` mentioning applications becomes `facts ==> A` in positive and
/// `facts && A` in negative positions. With fuel left a fact equates the
/// application with the instantiated body; otherwise only the ensures clauses
/// (and `>= 0` for nat results) are used. Ensures of `self` are never used.
TermRef inline_functions(TermRef f, int fuel, const std::map<std::string, ir::FunctionDef>& defs,
                         TermManager& tm, const std::string& self = {});

/// Full pipeline for one graph: WP, inlining, typing prelude, stable ids.
std::vector<VerificationCondition> generate(const ir::Graph& g, ir::Translator& tr,
                                            const VcOptions& opts = {});

/// Termination VCs of recursive call sites in declaration `decl` (empty for
/// non-recursive declarations). A recursive declaration without a decreases
/// clause yields a diagnostic instead.
std::vector<VerificationCondition> check_function_termination(
    const std::string& decl, const typecheck::TypedProgram& tp, ir::Translator& tr,
    const ir::CallGraph& cg, std::vector<Diagnostic>& diags, const VcOptions& opts = {});

/// `--emit-vc` text of one VC.
std::string dump(const VerificationCondition& vc);

}  // namespace minidafny::vcgen
