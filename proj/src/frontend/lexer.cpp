#include <algorithm>
#include <array>
#include <cctype>

#include "minidafny/frontend/token.hpp"

namespace minidafny::frontend {

namespace {

constexpr std::array<std::string_view, 28> kKeywords = {
    "method",   "function", "returns", "requires", "ensures", "modifies", "reads",
    "decreases", "invariant", "assert", "while",   "if",      "then",     "else",
    "var",      "ghost",    "class",   "forall",  "exists",  "true",     "false",
    "null",     "new",      "break",   "int",     "nat",     "bool",     "array"};

// Longest operators first so that maximal munch falls out of a linear scan.
constexpr std::array<std::string_view, 19> kOperators = {
    "<==>", "==>", ":=", "::", "<=", ">=", "==", "!=", "&&", "||",
    "<",    ">",   "+",  "-",  "*",  "/",  "%",  "!",  "."};

constexpr std::string_view kPunctuation = "(){}[],;:";

class Lexer {
 public:
  Lexer(std::string_view src, const std::string& file) : src_(src), file_(file) {}

  LexResult run() {
    LexResult out;
    while (true) {
      skip_trivia(out.diagnostics);
      if (pos_ >= src_.size()) break;
      char c = src_[pos_];
      std::size_t start = pos_;
      int line = line_, col = col_;
      TokenKind kind;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
                src_[pos_] == '\''))
          advance();
        kind = is_keyword(src_.substr(start, pos_ - start)) ? TokenKind::Keyword
                                                             : TokenKind::Identifier;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
          advance();
        kind = TokenKind::IntLiteral;
      } else if (auto op = match_operator()) {
        for (std::size_t i = 0; i < op; ++i) advance();
        kind = TokenKind::Operator;
      } else if (kPunctuation.find(c) != std::string_view::npos) {
        advance();
        kind = TokenKind::Punctuation;
      } else {
        Diagnostic d;
        d.span = Span{file_, line, col, line, col + 1};
        d.code = codes::kLex;
        d.message = std::string("unexpected character '") + c + "'";
        out.diagnostics.push_back(std::move(d));
        advance();
        continue;
      }
      Token t;
      t.kind = kind;
      t.lexeme = std::string(src_.substr(start, pos_ - start));
      t.span = Span{file_, line, col, line_, col_};
      t.offset = start;
      out.tokens.push_back(std::move(t));
    }
    Token eof;
    eof.kind = TokenKind::EndOfFile;
    eof.span = Span{file_, line_, col_, line_, col_};
    eof.offset = src_.size();
    out.tokens.push_back(std::move(eof));
    return out;
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else if ((static_cast<unsigned char>(src_[pos_]) & 0xC0) != 0x80) {
      // Count code points, not UTF-8 continuation bytes.
      ++col_;
    }
    ++pos_;
  }

  std::size_t match_operator() const {
    // ':' alone is punctuation (type annotations); ':=' and '::' are operators.
    for (auto op : kOperators)
      if (src_.substr(pos_, op.size()) == op) return op.size();
    return 0;
  }

  void skip_trivia(std::vector<Diagnostic>& diags) {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (src_.substr(pos_, 2) == "//") {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (src_.substr(pos_, 2) == "/*") {
        int line = line_, col = col_;
        advance();
        advance();
        bool closed = false;
        while (pos_ < src_.size()) {
          if (src_.substr(pos_, 2) == "*/") {
            advance();
            advance();
            closed = true;
            break;
          }
          advance();
        }
        if (!closed) {
          Diagnostic d;
          d.span = Span{file_, line, col, line_, col_};
          d.code = codes::kLex;
          d.message = "unterminated comment";
          diags.push_back(std::move(d));
        }
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  const std::string& file_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::string_view to_string(TokenKind k) {
  switch (k) {
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Identifier: return "identifier";
    case TokenKind::IntLiteral: return "integer";
    case TokenKind::Operator: return "operator";
    case TokenKind::Punctuation: return "punctuation";
    case TokenKind::EndOfFile: return "end of file";
  }
  return "?";
}

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

LexResult tokenize(std::string_view source, const std::string& file) {
  return Lexer(source, file).run();
}

}  // namespace minidafny::frontend
