#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "minidafny/frontend/ast.hpp"
#include "minidafny/frontend/token.hpp"

namespace minidafny::frontend {

struct ParseResult {
  std::optional<Program> program;  // absent whenever any diagnostic was reported
  std::vector<Diagnostic> diagnostics;
};

/// Recursive-descent parser. Recovers at statement and declaration
/// boundaries so that every syntax error in the input is reported.
ParseResult parse(const std::vector<Token>& tokens, const std::string& file = {});

/// tokenize + parse.
ParseResult parse_source(std::string_view source, const std::string& file = {});

/// Parses a standalone expression (used by tests and tools).
std::optional<ExprPtr> parse_expression(std::string_view source,
                                        std::vector<Diagnostic>* diags = nullptr);

}  // namespace minidafny::frontend
