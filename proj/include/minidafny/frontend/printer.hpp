#pragma once

#include <string>

#include "minidafny/frontend/ast.hpp"

namespace minidafny::frontend {

/// Renders an expression with the minimum parentheses the grammar needs.
std::string to_source(const Expr& e);

/// Renders a whole program. Re-parsing the output yields a structurally
/// identical AST.
std::string to_source(const Program& p);

std::string to_source(const Type& t);

}  // namespace minidafny::frontend
