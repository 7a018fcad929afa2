#include "minidafny/frontend/parser.hpp"

#include <charconv>
#include <stdexcept>

namespace minidafny::frontend {

namespace {

struct ParseError : std::runtime_error {
  Span span;
  ParseError(Span s, const std::string& msg) : std::runtime_error(msg), span(std::move(s)) {}
};

class Parser {
 public:
  Parser(const std::vector<Token>& tokens, std::string file)
      : toks_(tokens), file_(std::move(file)) {}

  ParseResult parse_program() {
    Program prog;
    prog.file = file_;
    while (!at_eof()) {
      try {
        if (peek().is_keyword("class")) {
          prog.classes.push_back(parse_class());
        } else if (peek().is_keyword("method")) {
          prog.methods.push_back(parse_method(""));
        } else if (peek().is_keyword("function")) {
          prog.functions.push_back(parse_function(""));
        } else {
          throw error(peek(), "expected 'class', 'method' or 'function'");
        }
      } catch (const ParseError& e) {
        report(e);
        sync_declaration();
      }
    }
    ParseResult r;
    r.diagnostics = std::move(diags_);
    if (r.diagnostics.empty()) r.program = std::move(prog);
    return r;
  }

  std::optional<ExprPtr> parse_standalone_expression() {
    try {
      auto e = parse_expr();
      if (!at_eof()) throw error(peek(), "unexpected trailing input");
      if (diags_.empty()) return e;
    } catch (const ParseError& e) {
      report(e);
    }
    return std::nullopt;
  }

  std::vector<Diagnostic>& diagnostics() { return diags_; }

 private:
  // ---- token helpers -------------------------------------------------------
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  bool at_eof() const { return peek().kind == TokenKind::EndOfFile; }
  const Token& advance() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  const Token& previous() const { return toks_[pos_ == 0 ? 0 : pos_ - 1]; }

  bool accept_op(std::string_view text) {
    if (peek().is_op(text)) {
      advance();
      return true;
    }
    return false;
  }
  bool accept_keyword(std::string_view text) {
    if (peek().is_keyword(text)) {
      advance();
      return true;
    }
    return false;
  }
  const Token& expect_op(std::string_view text) {
    if (!peek().is_op(text)) throw error(peek(), "expected '" + std::string(text) + "'");
    return advance();
  }
  const Token& expect_keyword(std::string_view text) {
    if (!peek().is_keyword(text)) throw error(peek(), "expected '" + std::string(text) + "'");
    return advance();
  }
  const Token& expect_ident(std::string_view what = "identifier") {
    if (peek().kind != TokenKind::Identifier) throw error(peek(), "expected " + std::string(what));
    return advance();
  }

  ParseError error(const Token& at, const std::string& msg) const {
    std::string found = at.kind == TokenKind::EndOfFile ? "end of file" : "'" + at.lexeme + "'";
    return ParseError(at.span, msg + ", found " + found);
  }

  void report(const ParseError& e) {
    Diagnostic d;
    d.span = e.span;
    d.code = codes::kSyntax;
    d.message = e.what();
    // One diagnostic per position keeps cascades out of the output.
    for (const auto& prev : diags_)
      if (prev.span.start_line == d.span.start_line && prev.span.start_col == d.span.start_col)
        return;
    diags_.push_back(std::move(d));
  }

  Span span_from(const Span& start) const {
    Span s = start;
    const Span& end = previous().span;
    s.end_line = end.end_line;
    s.end_col = end.end_col;
    return s;
  }

  // ---- recovery ------------------------------------------------------------
  void sync_declaration() {
    int depth = 0;
    while (!at_eof()) {
      const Token& t = peek();
      if (depth == 0 && (t.is_keyword("method") || t.is_keyword("function") ||
                         t.is_keyword("class")))
        return;
      if (t.is_op("{")) ++depth;
      if (t.is_op("}")) {
        if (depth == 0) {
          advance();
          return;
        }
        --depth;
      }
      advance();
    }
  }

  void sync_statement() {
    int depth = 0;
    while (!at_eof()) {
      const Token& t = peek();
      if (t.is_op("{")) ++depth;
      if (t.is_op("}")) {
        if (depth == 0) return;
        --depth;
        if (depth == 0) {
          advance();
          return;
        }
      }
      if (depth == 0 && t.is_op(";")) {
        advance();
        return;
      }
      advance();
    }
  }

  // ---- declarations --------------------------------------------------------
  ClassDecl parse_class() {
    ClassDecl c;
    Span start = expect_keyword("class").span;
    c.name = expect_ident("class name").lexeme;
    expect_op("{");
    while (!peek().is_op("}") && !at_eof()) {
      try {
        if (peek().is_keyword("method")) {
          c.methods.push_back(parse_method(c.name));
        } else if (peek().is_keyword("function")) {
          c.functions.push_back(parse_function(c.name));
        } else {
          throw error(peek(), "expected 'method' or 'function' in class body");
        }
      } catch (const ParseError& e) {
        report(e);
        sync_member();
      }
    }
    expect_op("}");
    c.span = span_from(start);
    return c;
  }

  void sync_member() {
    int depth = 0;
    while (!at_eof()) {
      const Token& t = peek();
      if (depth == 0 && (t.is_keyword("method") || t.is_keyword("function"))) return;
      if (t.is_op("{")) ++depth;
      if (t.is_op("}")) {
        if (depth == 0) return;  // end of class
        --depth;
      }
      advance();
    }
  }

  static std::string qualify(const std::string& cls, const std::string& name) {
    return cls.empty() ? name : cls + "." + name;
  }

  Type parse_type() {
    const Token& t = peek();
    if (accept_keyword("int")) return Type::integer();
    if (accept_keyword("nat")) return Type::natural();
    if (accept_keyword("bool")) return Type::boolean();
    if (accept_keyword("array")) {
      expect_op("<");
      const Token& et = peek();
      Type elem = parse_type();
      if (elem.kind != Type::Kind::Int && elem.kind != Type::Kind::Bool)
        throw ParseError(et.span, "array element type must be 'int' or 'bool'");
      expect_op(">");
      return Type::array_of(elem.kind);
    }
    throw error(t, "expected a type ('int', 'nat', 'bool' or 'array<T>')");
  }

  std::vector<Param> parse_params() {
    std::vector<Param> ps;
    expect_op("(");
    if (!peek().is_op(")")) {
      do {
        Param p;
        if (peek().is_keyword("ghost")) throw error(peek(), "ghost parameters are not supported");
        const Token& name = expect_ident("parameter name");
        p.name = name.lexeme;
        expect_op(":");
        p.type = parse_type();
        p.span = span_from(name.span);
        ps.push_back(std::move(p));
      } while (accept_op(","));
    }
    expect_op(")");
    return ps;
  }

  std::vector<Ident> parse_frame() {
    std::vector<Ident> ids;
    do {
      const Token& t = expect_ident("frame location");
      ids.push_back(Ident{t.lexeme, t.span});
    } while (accept_op(","));
    accept_op(";");
    return ids;
  }

  ExprPtr parse_clause_expr() {
    auto e = parse_expr();
    accept_op(";");
    return e;
  }

  ExprPtr parse_decreases() {
    auto e = parse_expr();
    if (peek().is_op(","))
      throw ParseError(peek().span,
                       "tuple decreases clauses are not supported; use a single integer "
                       "expression");
    accept_op(";");
    return e;
  }

  MethodDecl parse_method(const std::string& cls) {
    MethodDecl m;
    Span start = expect_keyword("method").span;
    const Token& name = expect_ident("method name");
    m.name = name.lexeme;
    m.name_span = name.span;
    m.qualified = qualify(cls, m.name);
    m.ins = parse_params();
    if (accept_keyword("returns")) m.outs = parse_params();
    while (true) {
      if (accept_keyword("requires")) {
        m.requires_.push_back(parse_clause_expr());
      } else if (accept_keyword("ensures")) {
        m.ensures.push_back(parse_clause_expr());
      } else if (accept_keyword("modifies")) {
        auto ids = parse_frame();
        m.modifies.insert(m.modifies.end(), ids.begin(), ids.end());
      } else if (accept_keyword("reads")) {
        auto ids = parse_frame();
        m.reads.insert(m.reads.end(), ids.begin(), ids.end());
      } else if (peek().is_keyword("decreases")) {
        const Token& kw = advance();
        if (m.decreases) throw ParseError(kw.span, "duplicate decreases clause");
        m.decreases = parse_decreases();
      } else {
        break;
      }
    }
    m.body = parse_block();
    m.span = span_from(start);
    return m;
  }

  FunctionDecl parse_function(const std::string& cls) {
    FunctionDecl f;
    Span start = expect_keyword("function").span;
    f.is_function_method = accept_keyword("method");
    const Token& name = expect_ident("function name");
    f.name = name.lexeme;
    f.name_span = name.span;
    f.qualified = qualify(cls, f.name);
    f.ins = parse_params();
    expect_op(":");
    f.return_type = parse_type();
    while (true) {
      if (accept_keyword("requires")) {
        f.requires_.push_back(parse_clause_expr());
      } else if (accept_keyword("ensures")) {
        f.ensures.push_back(parse_clause_expr());
      } else if (accept_keyword("reads")) {
        auto ids = parse_frame();
        f.reads.insert(f.reads.end(), ids.begin(), ids.end());
      } else if (peek().is_keyword("modifies")) {
        throw ParseError(peek().span, "functions cannot write to memory; 'modifies' not allowed");
      } else if (peek().is_keyword("decreases")) {
        const Token& kw = advance();
        if (f.decreases) throw ParseError(kw.span, "duplicate decreases clause");
        f.decreases = parse_decreases();
      } else {
        break;
      }
    }
    expect_op("{");
    f.body = parse_expr();
    if (!peek().is_op("}"))
      throw error(peek(), "a function body must be a single expression; expected '}'");
    advance();
    f.span = span_from(start);
    return f;
  }

  // ---- statements ----------------------------------------------------------
  Block parse_block() {
    Block b;
    Span start = expect_op("{").span;
    while (!peek().is_op("}") && !at_eof()) {
      try {
        b.stmts.push_back(parse_stmt());
      } catch (const ParseError& e) {
        report(e);
        sync_statement();
      }
    }
    expect_op("}");
    b.span = span_from(start);
    return b;
  }

  StmtPtr make_stmt(Stmt::Node node, const Span& start) {
    auto s = std::make_unique<Stmt>();
    s->node = std::move(node);
    s->span = span_from(start);
    s->id = next_stmt_id_++;
    return s;
  }

  StmtPtr parse_stmt() {
    const Token& first = peek();
    Span start = first.span;
    if (first.is_keyword("var") || first.is_keyword("ghost")) {
      VarDecl v;
      v.ghost = accept_keyword("ghost");
      expect_keyword("var");
      v.name = expect_ident("variable name").lexeme;
      if (peek().is_op(","))
        throw ParseError(peek().span, "declare one variable per 'var' statement");
      if (accept_op(":")) v.declared = parse_type();
      if (accept_op(":=")) v.init = parse_expr();
      expect_op(";");
      return make_stmt(std::move(v), start);
    }
    if (accept_keyword("if")) return parse_if(start);
    if (accept_keyword("while")) {
      While w;
      w.guard = parse_expr();
      while (true) {
        if (accept_keyword("invariant")) {
          w.invariants.push_back(parse_clause_expr());
        } else if (peek().is_keyword("decreases")) {
          const Token& kw = advance();
          if (w.decreases) throw ParseError(kw.span, "duplicate decreases clause");
          w.decreases = parse_decreases();
        } else {
          break;
        }
      }
      w.body = parse_block();
      return make_stmt(std::move(w), start);
    }
    if (accept_keyword("assert")) {
      Assert a;
      a.cond = parse_expr();
      expect_op(";");
      return make_stmt(std::move(a), start);
    }
    if (accept_keyword("break")) {
      expect_op(";");
      return make_stmt(Break{}, start);
    }
    if (first.is_keyword("new")) throw ParseError(first.span, "'new' is not supported");
    if (first.kind == TokenKind::Identifier) {
      // call statement: M(args);
      if (peek(1).is_op("(")) {
        MultiAssignCall c;
        c.callee = advance().lexeme;
        c.args = parse_args();
        expect_op(";");
        return make_stmt(std::move(c), start);
      }
      // multi-target call: x, y := M(args);
      if (peek(1).is_op(",")) {
        MultiAssignCall c;
        do {
          c.lhs.push_back(expect_ident("assignment target").lexeme);
        } while (accept_op(","));
        expect_op(":=");
        c.callee = expect_ident("method name").lexeme;
        c.args = parse_args();
        expect_op(";");
        return make_stmt(std::move(c), start);
      }
      Assign a;
      const Token& target = advance();
      a.target = target.lexeme;
      a.target_span = target.span;
      if (accept_op("[")) {
        a.index = parse_expr();
        expect_op("]");
        a.target_span = span_from(target.span);
      }
      expect_op(":=");
      a.rhs = parse_expr();
      expect_op(";");
      return make_stmt(std::move(a), start);
    }
    throw error(first, "expected a statement");
  }

  StmtPtr parse_if(const Span& start) {
    If s;
    s.cond = parse_expr();
    s.then_block = parse_block();
    if (accept_keyword("else")) {
      if (peek().is_keyword("if")) {
        Span inner = advance().span;
        Block b;
        b.stmts.push_back(parse_if(inner));
        b.span = b.stmts.back()->span;
        s.else_block = std::move(b);
      } else {
        s.else_block = parse_block();
      }
    }
    return make_stmt(std::move(s), start);
  }

  std::vector<ExprPtr> parse_args() {
    std::vector<ExprPtr> args;
    expect_op("(");
    if (!peek().is_op(")")) {
      do {
        args.push_back(parse_expr());
      } while (accept_op(","));
    }
    expect_op(")");
    return args;
  }

  // ---- expressions ---------------------------------------------------------
  ExprPtr bin(BinaryOp op, ExprPtr l, ExprPtr r) {
    Span s = Span::cover(l->span, r->span);
    return make_expr(Binary{op, std::move(l), std::move(r)}, s);
  }

 public:
  ExprPtr parse_expr() { return parse_iff(); }

 private:
  ExprPtr parse_iff() {
    auto e = parse_implies();
    while (accept_op("<==>")) e = bin(BinaryOp::Iff, std::move(e), parse_implies());
    return e;
  }

  ExprPtr parse_implies() {
    auto e = parse_or();
    if (accept_op("==>")) e = bin(BinaryOp::Implies, std::move(e), parse_implies());
    return e;
  }

  ExprPtr parse_or() {
    auto e = parse_and();
    while (accept_op("||")) e = bin(BinaryOp::Or, std::move(e), parse_and());
    return e;
  }

  ExprPtr parse_and() {
    auto e = parse_rel();
    while (accept_op("&&")) e = bin(BinaryOp::And, std::move(e), parse_rel());
    return e;
  }

  std::optional<BinaryOp> rel_op() const {
    const Token& t = peek();
    if (t.kind != TokenKind::Operator) return std::nullopt;
    if (t.lexeme == "<") return BinaryOp::Lt;
    if (t.lexeme == "<=") return BinaryOp::Le;
    if (t.lexeme == ">") return BinaryOp::Gt;
    if (t.lexeme == ">=") return BinaryOp::Ge;
    if (t.lexeme == "==") return BinaryOp::Eq;
    if (t.lexeme == "!=") return BinaryOp::Ne;
    return std::nullopt;
  }

  ExprPtr parse_rel() {
    auto first = parse_add();
    auto op = rel_op();
    if (!op) return first;
    std::vector<ExprPtr> operands;
    std::vector<BinaryOp> ops;
    std::vector<Span> op_spans;
    operands.push_back(std::move(first));
    while ((op = rel_op())) {
      op_spans.push_back(advance().span);
      ops.push_back(*op);
      operands.push_back(parse_add());
    }
    if (ops.size() == 1) return bin(ops[0], std::move(operands[0]), std::move(operands[1]));
    auto ascending = [](BinaryOp o) { return o == BinaryOp::Lt || o == BinaryOp::Le; };
    auto descending = [](BinaryOp o) { return o == BinaryOp::Gt || o == BinaryOp::Ge; };
    bool all_up = true, all_down = true;
    for (auto o : ops) {
      all_up = all_up && ascending(o);
      all_down = all_down && descending(o);
    }
    if (!all_up && !all_down)
      throw ParseError(op_spans[1],
                       "comparison chains must use '<'/'<=' only or '>'/'>=' only");
    Span s = Span::cover(operands.front()->span, operands.back()->span);
    return make_expr(ChainedCmp{std::move(operands), std::move(ops)}, s);
  }

  ExprPtr parse_add() {
    auto e = parse_mul();
    while (true) {
      if (accept_op("+")) {
        e = bin(BinaryOp::Add, std::move(e), parse_mul());
      } else if (accept_op("-")) {
        e = bin(BinaryOp::Sub, std::move(e), parse_mul());
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_mul() {
    auto e = parse_unary();
    while (true) {
      if (accept_op("*")) {
        e = bin(BinaryOp::Mul, std::move(e), parse_unary());
      } else if (accept_op("/")) {
        e = bin(BinaryOp::Div, std::move(e), parse_unary());
      } else if (accept_op("%")) {
        e = bin(BinaryOp::Mod, std::move(e), parse_unary());
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_unary() {
    const Token& t = peek();
    if (accept_op("!")) {
      auto operand = parse_unary();
      Span s = Span::cover(t.span, operand->span);
      return make_expr(Unary{UnaryOp::Not, std::move(operand)}, s);
    }
    if (accept_op("-")) {
      auto operand = parse_unary();
      Span s = Span::cover(t.span, operand->span);
      return make_expr(Unary{UnaryOp::Neg, std::move(operand)}, s);
    }
    return parse_postfix();
  }

  ExprPtr parse_postfix() {
    auto e = parse_primary();
    while (true) {
      if (accept_op("[")) {
        auto idx = parse_expr();
        expect_op("]");
        Span s = span_from(e->span);
        e = make_expr(ArraySelect{std::move(e), std::move(idx)}, s);
      } else if (accept_op(".")) {
        const Token& member = expect_ident("member name");
        if (member.lexeme != "Length")
          throw ParseError(member.span, "unknown member '" + member.lexeme +
                                            "'; only '.Length' is supported");
        Span s = span_from(e->span);
        e = make_expr(Length{std::move(e)}, s);
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_primary() {
    const Token& t = peek();
    Span start = t.span;
    if (t.kind == TokenKind::IntLiteral) {
      advance();
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(t.lexeme.data(), t.lexeme.data() + t.lexeme.size(), v);
      if (ec != std::errc()) throw ParseError(t.span, "integer literal out of range");
      return make_expr(IntLit{v}, t.span);
    }
    if (accept_keyword("true")) return make_expr(BoolLit{true}, t.span);
    if (accept_keyword("false")) return make_expr(BoolLit{false}, t.span);
    if (accept_keyword("null")) return make_expr(NullLit{}, t.span);
    if (t.is_keyword("new")) throw ParseError(t.span, "'new' is not supported");
    if (t.kind == TokenKind::Identifier) {
      advance();
      if (peek().is_op("(")) {
        Call c;
        c.callee = t.lexeme;
        c.args = parse_args();
        return make_expr(std::move(c), span_from(start));
      }
      return make_expr(VarRef{t.lexeme}, t.span);
    }
    if (accept_op("(")) {
      auto e = parse_expr();
      expect_op(")");
      return e;
    }
    if (accept_keyword("if")) {
      IfThenElse ite;
      ite.cond = parse_expr();
      expect_keyword("then");
      ite.then_expr = parse_expr();
      expect_keyword("else");
      ite.else_expr = parse_expr();
      return make_expr(std::move(ite), span_from(start));
    }
    if (t.is_keyword("forall") || t.is_keyword("exists")) {
      advance();
      Quantifier q;
      q.universal = t.lexeme == "forall";
      q.var = expect_ident("bound variable").lexeme;
      if (peek().is_op(",")) throw ParseError(peek().span, "a quantifier binds exactly one variable");
      if (accept_op(":")) {
        const Token& ty = peek();
        if (!parse_type().is_numeric())
          throw ParseError(ty.span, "quantified variables must be of type int");
      }
      expect_op("::");
      q.body = parse_expr();
      return make_expr(std::move(q), span_from(start));
    }
    throw error(t, "expected an expression");
  }

  const std::vector<Token>& toks_;
  std::string file_;
  std::size_t pos_ = 0;
  int next_stmt_id_ = 1;
  std::vector<Diagnostic> diags_;
};

}  // namespace

ParseResult parse(const std::vector<Token>& tokens, const std::string& file) {
  Parser p(tokens, file);
  return p.parse_program();
}

ParseResult parse_source(std::string_view source, const std::string& file) {
  auto lexed = tokenize(source, file);
  if (!lexed.ok()) {
    ParseResult r;
    r.diagnostics = std::move(lexed.diagnostics);
    // Keep going so syntax errors are reported alongside lexical ones.
    auto parsed = parse(lexed.tokens, file);
    for (auto& d : parsed.diagnostics) r.diagnostics.push_back(std::move(d));
    return r;
  }
  return parse(lexed.tokens, file);
}

std::optional<ExprPtr> parse_expression(std::string_view source, std::vector<Diagnostic>* diags) {
  auto lexed = tokenize(source);
  if (!lexed.ok()) {
    if (diags) *diags = lexed.diagnostics;
    return std::nullopt;
  }
  Parser p(lexed.tokens, "");
  auto e = p.parse_standalone_expression();
  if (diags) *diags = p.diagnostics();
  return e;
}

}  // namespace minidafny::frontend
