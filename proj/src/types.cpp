#include "minidafny/types.hpp"

namespace minidafny {

namespace {
std::string kind_name(Type::Kind k) {
  switch (k) {
    case Type::Kind::Int: return "int";
    case Type::Kind::Nat: return "nat";
    case Type::Kind::Bool: return "bool";
    case Type::Kind::Null: return "null";
    case Type::Kind::Array: return "array";
    case Type::Kind::Error: return "<error>";
  }
  return "?";
}
}  // namespace

std::string Type::str() const {
  if (kind == Kind::Array) return "array<" + kind_name(elem) + ">";
  return kind_name(kind);
}

bool assignable(const Type& to, const Type& from) {
  if (to.is_error() || from.is_error()) return true;
  if (to.is_numeric() && from.is_numeric()) return true;
  if (to.is_bool() && from.is_bool()) return true;
  if (to.is_array() && from.kind == Type::Kind::Null) return true;
  if (to.is_array() && from.is_array()) return to.elem == from.elem;
  return false;
}

}  // namespace minidafny
