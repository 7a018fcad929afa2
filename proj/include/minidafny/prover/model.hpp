#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "minidafny/logic/term.hpp"

namespace minidafny::prover {

using logic::TermRef;

/// Contents of one heap map: (ref, index) -> element value.
struct HeapTable {
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> entries;
  std::int64_t default_value = 0;
};

/// An array variable as seen in a counterexample.
struct ArrayValue {
  bool is_null = false;
  std::int64_t ref = 0;
  std::int64_t length = 0;
  std::map<std::int64_t, std::int64_t> entries;  // only indices in [0, length)
  std::int64_t default_value = 0;
  bool bool_elements = false;
};

/// Satisfying assignment of a ground formula. Refs are integers with null as
/// 0. Booleans in `ground_values` and heap tables are stored as 0/1.
struct Model {
  std::map<std::string, std::int64_t> ints;  // Int and Ref constants
  std::map<std::string, bool> bools;
  std::map<std::string, HeapTable> heaps;
  std::map<std::int64_t, std::int64_t> lengths;   // ref -> length
  std::map<std::string, ArrayValue> arrays;       // Ref constants, for display
  logic::TermMap<std::int64_t> ground_values;     // uninterpreted ground applications

  bool empty() const {
    return ints.empty() && bools.empty() && heaps.empty() && lengths.empty() && ground_values.empty();
  }
  std::int64_t length_of(std::int64_t ref) const;
  std::int64_t heap_value(const std::string& heap, std::int64_t ref, std::int64_t index) const;

  /// Fills `arrays` from the `$heap`/`$heapb` tables for the given Ref
  /// constants (name -> has bool elements).
  void derive_arrays(const std::map<std::string, bool>& ref_consts);

  /// One line per scalar/array, sorted by name: `x = 3`, `a = [1, 2] (length 2)`.
  std::vector<std::string> describe(const std::vector<std::string>& names) const;
};

/// Value of a term under a model: Int/Ref/Bool as int64 (bools 0/1).
/// Quantifiers range over `int_domain` (Int) and `ref_domain` (Ref).
/// Division and modulo are Euclidean with `x / 0 = 0` and `x % 0 = x`.
/// Returns nullopt on arithmetic overflow.
class Evaluator {
 public:
  explicit Evaluator(const Model& m) : m_(m) {}
  std::vector<std::int64_t> int_domain;
  std::vector<std::int64_t> ref_domain;
  /// Overrides the model's table for function applications when set.
  std::function<std::optional<std::int64_t>(TermRef, const std::vector<std::int64_t>&)> apply_hook;

  std::optional<std::int64_t> eval(TermRef t);
  std::optional<bool> holds(TermRef t) {
    auto v = eval(t);
    if (!v) return std::nullopt;
    return *v != 0;
  }

 private:
  struct HeapView {
    std::string base;
    std::vector<std::tuple<std::int64_t, std::int64_t, std::int64_t>> writes;  // oldest first
  };
  std::optional<HeapView> heap(TermRef t);
  std::int64_t apply_value(TermRef t, const std::vector<std::int64_t>& args);

  const Model& m_;
  std::map<std::string, std::int64_t> env_;
};

/// Euclidean division and remainder (remainder always in [0, |b|)).
std::int64_t euclid_div(std::int64_t a, std::int64_t b);
std::int64_t euclid_mod(std::int64_t a, std::int64_t b);

}  // namespace minidafny::prover
