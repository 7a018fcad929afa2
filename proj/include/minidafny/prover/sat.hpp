#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

namespace minidafny::prover {

/// Literals are non-zero ints: `v` or `-v` for variable `v >= 1`.
using Lit = int;

/// Hook for a background theory. `check` sees the literals currently true
/// (in assignment order) and returns an empty vector when they are
/// consistent, otherwise a conflict clause whose literals are all false under
/// the current assignment.
class TheoryHook {
 public:
  virtual ~TheoryHook() = default;
  virtual std::vector<Lit> check(const std::vector<Lit>& trail, bool complete) = 0;
};

/// Conflict-driven clause learning with two watched literals, first-UIP
/// learning and activity-ordered decisions. Deterministic: no randomness.
class SatSolver {
 public:
  enum class Result { Sat, Unsat };

  int new_var();
  int num_vars() const { return static_cast<int>(activity_.size()) - 1; }
  void add_clause(std::vector<Lit> clause);

  /// Throws DeadlineExceeded after `deadline`.
  Result solve(TheoryHook* theory, std::chrono::steady_clock::time_point deadline);

  /// Value of variable `v` after Sat.
  bool value(int v) const { return assign_[v] == 1; }

 private:
  static int index(Lit l) { return 2 * (l > 0 ? l : -l) + (l < 0 ? 1 : 0); }
  int lit_value(Lit l) const {
    int a = assign_[l > 0 ? l : -l];
    if (a < 0) return -1;
    return (l > 0) == (a == 1) ? 1 : 0;
  }
  void enqueue(Lit l, int reason);
  int propagate();  // conflicting clause index or -1
  void backtrack(int level);
  int attach(std::vector<Lit> clause);
  void learn_and_backjump(int conflict);

  std::vector<std::vector<Lit>> clauses_;
  std::vector<std::vector<int>> watches_;  // by literal index
  std::vector<int> assign_{-1};            // -1 unassigned, 0 false, 1 true
  std::vector<int> level_{0};
  std::vector<int> reason_{-1};
  std::vector<double> activity_{0};
  std::vector<char> phase_{0};
  std::vector<Lit> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;
  double bump_ = 1.0;
  bool empty_clause_ = false;
  std::vector<std::vector<Lit>> pending_;  // clauses added before solve
};

}  // namespace minidafny::prover
