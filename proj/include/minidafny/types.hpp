#pragma once

#include <string>

namespace minidafny {

/// Source-level types. `Nat` is a refinement of `Int`; arrays are nullable
/// references whose element type is `Int` or `Bool`.
struct Type {
  enum class Kind { Error, Int, Nat, Bool, Array, Null };

  Kind kind = Kind::Error;
  Kind elem = Kind::Error;  // meaningful only for Array

  static Type integer() { return {Kind::Int, Kind::Error}; }
  static Type natural() { return {Kind::Nat, Kind::Error}; }
  static Type boolean() { return {Kind::Bool, Kind::Error}; }
  static Type null_type() { return {Kind::Null, Kind::Error}; }
  static Type error() { return {}; }
  static Type array_of(Kind element) { return {Kind::Array, element}; }

  bool is_error() const { return kind == Kind::Error; }
  bool is_numeric() const { return kind == Kind::Int || kind == Kind::Nat; }
  bool is_bool() const { return kind == Kind::Bool; }
  bool is_array() const { return kind == Kind::Array; }
  bool is_reference() const { return kind == Kind::Array || kind == Kind::Null; }

  bool operator==(const Type&) const = default;

  std::string str() const;
};

/// True when a value of type `from` may be stored in a slot of type `to`.
/// Int flows into Nat (the verifier emits a NatNonNegative obligation).
bool assignable(const Type& to, const Type& from);

}  // namespace minidafny
