#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "minidafny/diagnostic.hpp"

namespace minidafny::frontend {

enum class TokenKind { Keyword, Identifier, IntLiteral, Operator, Punctuation, EndOfFile };

std::string_view to_string(TokenKind k);

struct Token {
  TokenKind kind = TokenKind::EndOfFile;
  std::string lexeme;
  Span span;
  /// Byte offset of the lexeme in the source; lexemes plus the skipped gaps
  /// between them reconstruct the input exactly.
  std::size_t offset = 0;

  bool is(TokenKind k, std::string_view text) const { return kind == k && lexeme == text; }
  bool is_keyword(std::string_view text) const { return is(TokenKind::Keyword, text); }
  bool is_op(std::string_view text) const {
    return (kind == TokenKind::Operator || kind == TokenKind::Punctuation) && lexeme == text;
  }
};

bool is_keyword(std::string_view word);

struct LexResult {
  std::vector<Token> tokens;  // always terminated by an EndOfFile token
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

/// Splits `source` into tokens. `//` and `/* */` comments are skipped.
LexResult tokenize(std::string_view source, const std::string& file = {});

}  // namespace minidafny::frontend
