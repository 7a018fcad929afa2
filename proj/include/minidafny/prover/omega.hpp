#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace minidafny::prover {

/// `sum(coef[v] * v) + constant  (== 0 | <= 0)` over integer variables.
struct LinConstraint {
  std::map<int, std::int64_t> coef;
  std::int64_t constant = 0;
  bool equality = false;
};

/// Raised when intermediate coefficients leave the int64 range.
struct ArithmeticOverflow : std::runtime_error {
  ArithmeticOverflow() : std::runtime_error("integer overflow in arithmetic decision procedure") {}
};

struct DeadlineExceeded : std::runtime_error {
  DeadlineExceeded() : std::runtime_error("deadline exceeded") {}
};

using Clock = std::chrono::steady_clock;

/// Exact integer feasibility of a conjunction (Pugh's Omega test). Returns an
/// assignment for every variable mentioned, or std::nullopt when the system
/// has no integer solution. Free variables are set as close to 0 as the
/// constraints allow.
std::optional<std::map<int, std::int64_t>> omega_solve(
    const std::vector<LinConstraint>& constraints,
    Clock::time_point deadline = Clock::time_point::max());

}  // namespace minidafny::prover
