#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "minidafny/logic/term.hpp"
#include "minidafny/prover/model.hpp"

namespace minidafny::testing {

/// Evaluates a quantifier-free term under `m` without using the prover's
/// evaluator. Arithmetic is done in 128 bits; nullopt means the term is
/// outside what the oracle understands (quantifiers, unknown applications)
/// or left the int64 range.
std::optional<std::int64_t> oracle_value(logic::TermRef t, const prover::Model& m);
std::optional<bool> oracle_holds(logic::TermRef t, const prover::Model& m);

/// Random quantifier-free linear formula over `vars` (Int Consts). Atoms
/// compare two small linear combinations; connectives nest up to `depth`.
logic::TermRef random_lia(logic::TermManager& tm, std::mt19937_64& rng,
                          const std::vector<logic::TermRef>& vars, int depth);

/// First assignment in [lo, hi]^n (lexicographic) making `f` true.
std::optional<std::map<std::string, std::int64_t>> brute_force_sat(
    logic::TermRef f, const std::vector<logic::TermRef>& vars, std::int64_t lo, std::int64_t hi);

}  // namespace minidafny::testing
