#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "minidafny/diagnostic.hpp"
#include "minidafny/types.hpp"

namespace minidafny::frontend {

enum class BinaryOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or, Implies, Iff };
enum class UnaryOp { Not, Neg };

std::string_view spelling(BinaryOp op);
bool is_relational(BinaryOp op);

/// What an identifier resolved to. Filled in by the type checker.
enum class SymbolKind { Unresolved, InParam, OutParam, Local, BoundVar, Function, Method };

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct IntLit {
  std::int64_t value = 0;
};
struct BoolLit {
  bool value = false;
};
struct NullLit {};
struct VarRef {
  std::string name;
  SymbolKind binding = SymbolKind::Unresolved;
  bool ghost = false;  // set by the checker for ghost locals
};
struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct Unary {
  UnaryOp op;
  ExprPtr operand;
};
/// `a <= b < c`: operands.size() == ops.size() + 1 and ops.size() >= 2.
struct ChainedCmp {
  std::vector<ExprPtr> operands;
  std::vector<BinaryOp> ops;
};
struct ArraySelect {
  ExprPtr array;
  ExprPtr index;
};
struct Length {
  ExprPtr array;
};
struct IfThenElse {
  ExprPtr cond;
  ExprPtr then_expr;
  ExprPtr else_expr;
};
struct Call {
  std::string callee;
  std::vector<ExprPtr> args;
  std::string resolved;  // qualified declaration name, filled by the checker
};
struct Quantifier {
  bool universal = true;
  std::string var;  // always int-typed
  ExprPtr body;
};

struct Expr {
  using Node = std::variant<IntLit, BoolLit, NullLit, VarRef, Binary, Unary, ChainedCmp,
                            ArraySelect, Length, IfThenElse, Call, Quantifier>;
  Node node;
  Span span;
  Type type;  // filled by the checker

  template <class T>
  const T* as() const { return std::get_if<T>(&node); }
  template <class T>
  T* as() { return std::get_if<T>(&node); }
};

template <class T>
ExprPtr make_expr(T node, Span span) {
  auto e = std::make_unique<Expr>();
  e->node = std::move(node);
  e->span = std::move(span);
  return e;
}

ExprPtr clone(const Expr& e);
inline ExprPtr clone(const ExprPtr& e) { return e ? clone(*e) : nullptr; }

/// Structural equality ignoring spans and checker annotations.
bool structurally_equal(const Expr& a, const Expr& b);

/// Calls `fn` on `e` and then on every sub-expression, pre-order.
void for_each_subexpr(const Expr& e, const std::function<void(const Expr&)>& fn);

/// Rewrites every ChainedCmp into a left-to-right conjunction of binary
/// comparisons, sharing no nodes with the input.
ExprPtr desugar_chains(const Expr& e);

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Block {
  std::vector<StmtPtr> stmts;
  Span span;
};

struct VarDecl {
  std::string name;
  std::optional<Type> declared;
  ExprPtr init;
  bool ghost = false;
  Type type;  // resolved
};
/// `x := e` or `a[i] := e`.
struct Assign {
  std::string target;
  ExprPtr index;  // null for scalar assignment
  ExprPtr rhs;
  Span target_span;
};
/// `x, y := M(args)`, `var x := M(args)` (declares), or `M(args)` (no outputs).
struct MultiAssignCall {
  std::vector<std::string> lhs;
  bool declares = false;
  bool ghost = false;
  std::string callee;
  std::vector<ExprPtr> args;
  std::string resolved;
  std::vector<Type> lhs_types;  // resolved
};
struct If {
  ExprPtr cond;
  Block then_block;
  std::optional<Block> else_block;
};
struct While {
  ExprPtr guard;
  std::vector<ExprPtr> invariants;
  ExprPtr decreases;
  Block body;
};
struct Assert {
  ExprPtr cond;
};
struct Break {};

struct Stmt {
  using Node = std::variant<VarDecl, Assign, MultiAssignCall, If, While, Assert, Break>;
  Node node;
  Span span;
  int id = 0;  // unique within a program; names havoc sites

  template <class T>
  const T* as() const { return std::get_if<T>(&node); }
  template <class T>
  T* as() { return std::get_if<T>(&node); }
};

struct Ident {
  std::string name;
  Span span;
};

struct Param {
  std::string name;
  Type type;
  Span span;
};

struct MethodDecl {
  std::string name;
  std::string qualified;  // Class.Name or Name
  std::vector<Param> ins;
  std::vector<Param> outs;
  std::vector<ExprPtr> requires_;
  std::vector<Ident> modifies;
  std::vector<Ident> reads;  // accepted and ignored with a warning
  std::vector<ExprPtr> ensures;
  ExprPtr decreases;
  Block body;
  Span span;
  Span name_span;
};

struct FunctionDecl {
  std::string name;
  std::string qualified;
  bool is_function_method = false;
  std::vector<Param> ins;
  Type return_type;
  std::vector<ExprPtr> requires_;
  std::vector<Ident> reads;
  std::vector<ExprPtr> ensures;
  ExprPtr decreases;
  ExprPtr body;
  Span span;
  Span name_span;
};

struct ClassDecl {
  std::string name;
  std::vector<MethodDecl> methods;
  std::vector<FunctionDecl> functions;
  Span span;
};

struct Program {
  std::string file;
  std::vector<ClassDecl> classes;
  std::vector<MethodDecl> methods;
  std::vector<FunctionDecl> functions;
};

bool structurally_equal(const Program& a, const Program& b);

/// Visits every method / function of the program in source order.
template <class MethodFn, class FunctionFn>
void for_each_decl(Program& p, MethodFn&& on_method, FunctionFn&& on_function);
template <class MethodFn, class FunctionFn>
void for_each_decl(const Program& p, MethodFn&& on_method, FunctionFn&& on_function);

/// Pointers to every declaration ordered by source position.
struct DeclRef {
  const MethodDecl* method = nullptr;
  const FunctionDecl* function = nullptr;
  const Span& span() const { return method ? method->span : function->span; }
  const std::string& qualified() const { return method ? method->qualified : function->qualified; }
};
std::vector<DeclRef> declarations_in_order(const Program& p);

/// Calls `fn` on every statement of `b`, descending into nested blocks.
void for_each_stmt(const Block& b, const std::function<void(const Stmt&)>& fn);

template <class MethodFn, class FunctionFn>
void for_each_decl(Program& p, MethodFn&& on_method, FunctionFn&& on_function) {
  for (auto& c : p.classes) {
    for (auto& m : c.methods) on_method(m);
    for (auto& f : c.functions) on_function(f);
  }
  for (auto& m : p.methods) on_method(m);
  for (auto& f : p.functions) on_function(f);
}

template <class MethodFn, class FunctionFn>
void for_each_decl(const Program& p, MethodFn&& on_method, FunctionFn&& on_function) {
  for (const auto& c : p.classes) {
    for (const auto& m : c.methods) on_method(m);
    for (const auto& f : c.functions) on_function(f);
  }
  for (const auto& m : p.methods) on_method(m);
  for (const auto& f : p.functions) on_function(f);
}

}  // namespace minidafny::frontend
