#pragma once

#include <chrono>
#include <map>
#include <string>
#include <vector>

#include "minidafny/logic/term.hpp"
#include "minidafny/prover/ground.hpp"
#include "minidafny/prover/model.hpp"
#include "minidafny/vcgen/vc.hpp"

namespace minidafny::prover {

namespace reason {
inline constexpr const char* kInstantiationLimit = "instantiation-limit";
inline constexpr const char* kTimeout = "timeout";
inline constexpr const char* kExternalUnknown = "external-solver-unknown";
inline constexpr const char* kUnsupported = "unsupported-fragment";
}  // namespace reason

struct ProverConfig {
  std::chrono::milliseconds timeout{10000};
  int rounds = 3;             // instantiation rounds
  int instance_cap = 10000;   // total quantifier instances
  int model_rounds = 8;       // model-based instantiation rounds after Sat
  bool minimize = true;
  /// Definitions used to repair counterexamples whose function values
  /// disagree with the bodies; null disables the repair.
  const std::map<std::string, ir::FunctionDef>* functions = nullptr;
  int function_rounds = 32;
};

struct Verdict {
  enum class Kind { Proved, Counterexample, Unknown };
  Kind kind = Kind::Unknown;
  Model model;         // Counterexample only
  std::string reason;  // Unknown only
  /// Quantifier-free formulas the model satisfies (Counterexample) or that
  /// were refuted (Proved). Universals appear as Bool proxies `$q!N`.
  std::vector<TermRef> ground_core;
  int instances = 0;

  static Verdict proved() { return {Kind::Proved, {}, {}, {}, 0}; }
  static Verdict unknown(std::string why) { return {Kind::Unknown, {}, std::move(why), {}, 0}; }
};

std::string_view to_string(Verdict::Kind k);

/// Satisfiability of a conjunction of closed formulas: Proved means
/// unsatisfiable, Counterexample carries a satisfying model of the ground
/// core.
Verdict check_sat(const std::vector<TermRef>& formulas, logic::TermManager& tm, const ProverConfig& cfg = {});

/// Validity of `prelude ==> goal` via satisfiability of its negation.
Verdict prove(const vcgen::VerificationCondition& vc, logic::TermManager& tm, const ProverConfig& cfg = {});

/// Negation normal form: only And/Or/Not/Forall/Exists above quantifiers;
/// quantifier-free subformulas are kept intact (possibly under one Not).
TermRef to_nnf(TermRef f, logic::TermManager& tm);

struct Skolemized {
  TermRef formula = nullptr;
  bool unsupported = false;  // existential below a universal
};

/// Replaces existentials that are not below a universal by their bound
/// constant, which then occurs free. Bound names are unique per quantifier,
/// and a shared existential only recurs in disjunctive positions of a negated
/// VC, so one witness per name suffices.
Skolemized skolemize(TermRef nnf, logic::TermManager& tm);

struct GroundClauseSet {
  std::vector<TermRef> clauses;  // quantifier-free
  int instances = 0;
  bool limit_hit = false;
  bool unsupported = false;
};

/// Instantiates every universal of the (negation normal form, skolemized)
/// formulas at the ground Int/Ref terms of the clause set, `rounds` times
/// with deduplication. Each universal is replaced by a Bool proxy `p` and an
/// instance is added as `!p || body[t/x]`.
GroundClauseSet instantiate_quantifiers(const std::vector<TermRef>& formulas, logic::TermManager& tm,
                                        int rounds, int cap = 10000);

}  // namespace minidafny::prover
