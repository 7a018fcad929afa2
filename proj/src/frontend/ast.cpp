#include "minidafny/frontend/ast.hpp"

#include <algorithm>
#include <tuple>

namespace minidafny::frontend {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

std::string_view spelling(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
    case BinaryOp::Implies: return "==>";
    case BinaryOp::Iff: return "<==>";
  }
  return "?";
}

bool is_relational(BinaryOp op) {
  switch (op) {
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge:
    case BinaryOp::Eq:
    case BinaryOp::Ne: return true;
    default: return false;
  }
}

ExprPtr clone(const Expr& e) {
  auto out = std::make_unique<Expr>();
  out->span = e.span;
  out->type = e.type;
  out->node = std::visit(
      overloaded{
          [](const IntLit& n) -> Expr::Node { return n; },
          [](const BoolLit& n) -> Expr::Node { return n; },
          [](const NullLit& n) -> Expr::Node { return n; },
          [](const VarRef& n) -> Expr::Node { return n; },
          [](const Binary& n) -> Expr::Node {
            return Binary{n.op, clone(*n.lhs), clone(*n.rhs)};
          },
          [](const Unary& n) -> Expr::Node { return Unary{n.op, clone(*n.operand)}; },
          [](const ChainedCmp& n) -> Expr::Node {
            ChainedCmp c;
            for (const auto& o : n.operands) c.operands.push_back(clone(*o));
            c.ops = n.ops;
            return c;
          },
          [](const ArraySelect& n) -> Expr::Node {
            return ArraySelect{clone(*n.array), clone(*n.index)};
          },
          [](const Length& n) -> Expr::Node { return Length{clone(*n.array)}; },
          [](const IfThenElse& n) -> Expr::Node {
            return IfThenElse{clone(*n.cond), clone(*n.then_expr), clone(*n.else_expr)};
          },
          [](const Call& n) -> Expr::Node {
            Call c;
            c.callee = n.callee;
            c.resolved = n.resolved;
            for (const auto& a : n.args) c.args.push_back(clone(*a));
            return c;
          },
          [](const Quantifier& n) -> Expr::Node {
            return Quantifier{n.universal, n.var, clone(*n.body)};
          },
      },
      e.node);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      overloaded{
          [&](const IntLit& x) { return x.value == b.as<IntLit>()->value; },
          [&](const BoolLit& x) { return x.value == b.as<BoolLit>()->value; },
          [&](const NullLit&) { return true; },
          [&](const VarRef& x) { return x.name == b.as<VarRef>()->name; },
          [&](const Binary& x) {
            const auto* y = b.as<Binary>();
            return x.op == y->op && structurally_equal(*x.lhs, *y->lhs) &&
                   structurally_equal(*x.rhs, *y->rhs);
          },
          [&](const Unary& x) {
            const auto* y = b.as<Unary>();
            return x.op == y->op && structurally_equal(*x.operand, *y->operand);
          },
          [&](const ChainedCmp& x) {
            const auto* y = b.as<ChainedCmp>();
            if (x.ops != y->ops || x.operands.size() != y->operands.size()) return false;
            for (std::size_t i = 0; i < x.operands.size(); ++i)
              if (!structurally_equal(*x.operands[i], *y->operands[i])) return false;
            return true;
          },
          [&](const ArraySelect& x) {
            const auto* y = b.as<ArraySelect>();
            return structurally_equal(*x.array, *y->array) &&
                   structurally_equal(*x.index, *y->index);
          },
          [&](const Length& x) { return structurally_equal(*x.array, *b.as<Length>()->array); },
          [&](const IfThenElse& x) {
            const auto* y = b.as<IfThenElse>();
            return structurally_equal(*x.cond, *y->cond) &&
                   structurally_equal(*x.then_expr, *y->then_expr) &&
                   structurally_equal(*x.else_expr, *y->else_expr);
          },
          [&](const Call& x) {
            const auto* y = b.as<Call>();
            if (x.callee != y->callee || x.args.size() != y->args.size()) return false;
            for (std::size_t i = 0; i < x.args.size(); ++i)
              if (!structurally_equal(*x.args[i], *y->args[i])) return false;
            return true;
          },
          [&](const Quantifier& x) {
            const auto* y = b.as<Quantifier>();
            return x.universal == y->universal && x.var == y->var &&
                   structurally_equal(*x.body, *y->body);
          },
      },
      a.node);
}

ExprPtr desugar_chains(const Expr& e) {
  auto out = clone(e);
  // Rewrite bottom-up in place on the fresh copy.
  struct Rewriter {
    void operator()(ExprPtr& p) {
      std::visit(overloaded{
                     [&](Binary& n) {
                       (*this)(n.lhs);
                       (*this)(n.rhs);
                     },
                     [&](Unary& n) { (*this)(n.operand); },
                     [&](ArraySelect& n) {
                       (*this)(n.array);
                       (*this)(n.index);
                     },
                     [&](Length& n) { (*this)(n.array); },
                     [&](IfThenElse& n) {
                       (*this)(n.cond);
                       (*this)(n.then_expr);
                       (*this)(n.else_expr);
                     },
                     [&](Call& n) {
                       for (auto& a : n.args) (*this)(a);
                     },
                     [&](Quantifier& n) { (*this)(n.body); },
                     [&](ChainedCmp& n) {
                       for (auto& o : n.operands) (*this)(o);
                       ExprPtr acc;
                       for (std::size_t i = 0; i < n.ops.size(); ++i) {
                         Span s = Span::cover(n.operands[i]->span, n.operands[i + 1]->span);
                         auto cmp = make_expr(
                             Binary{n.ops[i], clone(*n.operands[i]), clone(*n.operands[i + 1])}, s);
                         cmp->type = Type::boolean();
                         if (!acc) {
                           acc = std::move(cmp);
                         } else {
                           Span all = Span::cover(acc->span, s);
                           acc = make_expr(Binary{BinaryOp::And, std::move(acc), std::move(cmp)},
                                           all);
                           acc->type = Type::boolean();
                         }
                       }
                       acc->span = p->span;
                       p = std::move(acc);
                     },
                     [](auto&) {},
                 },
                 p->node);
    }
  };
  Rewriter{}(out);
  return out;
}

namespace {

bool params_equal(const std::vector<Param>& a, const std::vector<Param>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].name != b[i].name || a[i].type != b[i].type) return false;
  return true;
}

bool exprs_equal(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!structurally_equal(*a[i], *b[i])) return false;
  return true;
}

bool opt_equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return structurally_equal(*a, *b);
}

bool idents_equal(const std::vector<Ident>& a, const std::vector<Ident>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].name != b[i].name) return false;
  return true;
}

bool blocks_equal(const Block& a, const Block& b);

bool stmts_equal(const Stmt& a, const Stmt& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      overloaded{
          [&](const VarDecl& x) {
            const auto* y = b.as<VarDecl>();
            return x.name == y->name && x.declared == y->declared && x.ghost == y->ghost &&
                   opt_equal(x.init, y->init);
          },
          [&](const Assign& x) {
            const auto* y = b.as<Assign>();
            return x.target == y->target && opt_equal(x.index, y->index) &&
                   structurally_equal(*x.rhs, *y->rhs);
          },
          [&](const MultiAssignCall& x) {
            const auto* y = b.as<MultiAssignCall>();
            return x.lhs == y->lhs && x.declares == y->declares && x.callee == y->callee &&
                   exprs_equal(x.args, y->args);
          },
          [&](const If& x) {
            const auto* y = b.as<If>();
            if (!structurally_equal(*x.cond, *y->cond)) return false;
            if (!blocks_equal(x.then_block, y->then_block)) return false;
            if (x.else_block.has_value() != y->else_block.has_value()) return false;
            return !x.else_block || blocks_equal(*x.else_block, *y->else_block);
          },
          [&](const While& x) {
            const auto* y = b.as<While>();
            return structurally_equal(*x.guard, *y->guard) &&
                   exprs_equal(x.invariants, y->invariants) &&
                   opt_equal(x.decreases, y->decreases) && blocks_equal(x.body, y->body);
          },
          [&](const Assert& x) { return structurally_equal(*x.cond, *b.as<Assert>()->cond); },
          [&](const Break&) { return true; },
      },
      a.node);
}

bool blocks_equal(const Block& a, const Block& b) {
  if (a.stmts.size() != b.stmts.size()) return false;
  for (std::size_t i = 0; i < a.stmts.size(); ++i)
    if (!stmts_equal(*a.stmts[i], *b.stmts[i])) return false;
  return true;
}

bool methods_equal(const MethodDecl& a, const MethodDecl& b) {
  return a.name == b.name && params_equal(a.ins, b.ins) && params_equal(a.outs, b.outs) &&
         exprs_equal(a.requires_, b.requires_) && idents_equal(a.modifies, b.modifies) &&
         idents_equal(a.reads, b.reads) && exprs_equal(a.ensures, b.ensures) &&
         opt_equal(a.decreases, b.decreases) && blocks_equal(a.body, b.body);
}

bool functions_equal(const FunctionDecl& a, const FunctionDecl& b) {
  return a.name == b.name && a.is_function_method == b.is_function_method &&
         params_equal(a.ins, b.ins) && a.return_type == b.return_type &&
         exprs_equal(a.requires_, b.requires_) && idents_equal(a.reads, b.reads) &&
         exprs_equal(a.ensures, b.ensures) && opt_equal(a.decreases, b.decreases) &&
         structurally_equal(*a.body, *b.body);
}

template <class T, class Eq>
bool all_equal(const std::vector<T>& a, const std::vector<T>& b, Eq eq) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!eq(a[i], b[i])) return false;
  return true;
}

}  // namespace

bool structurally_equal(const Program& a, const Program& b) {
  auto class_eq = [](const ClassDecl& x, const ClassDecl& y) {
    return x.name == y.name && all_equal(x.methods, y.methods, methods_equal) &&
           all_equal(x.functions, y.functions, functions_equal);
  };
  return all_equal(a.classes, b.classes, class_eq) &&
         all_equal(a.methods, b.methods, methods_equal) &&
         all_equal(a.functions, b.functions, functions_equal);
}

std::vector<DeclRef> declarations_in_order(const Program& p) {
  std::vector<DeclRef> out;
  for_each_decl(
      p, [&](const MethodDecl& m) { out.push_back(DeclRef{&m, nullptr}); },
      [&](const FunctionDecl& f) { out.push_back(DeclRef{nullptr, &f}); });
  std::stable_sort(out.begin(), out.end(), [](const DeclRef& a, const DeclRef& b) {
    return std::tie(a.span().start_line, a.span().start_col) <
           std::tie(b.span().start_line, b.span().start_col);
  });
  return out;
}

}  // namespace minidafny::frontend

namespace minidafny::frontend {

void for_each_subexpr(const Expr& e, const std::function<void(const Expr&)>& fn) {
  fn(e);
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Binary>) {
          for_each_subexpr(*n.lhs, fn);
          for_each_subexpr(*n.rhs, fn);
        } else if constexpr (std::is_same_v<T, Unary>) {
          for_each_subexpr(*n.operand, fn);
        } else if constexpr (std::is_same_v<T, ChainedCmp>) {
          for (const auto& o : n.operands) for_each_subexpr(*o, fn);
        } else if constexpr (std::is_same_v<T, ArraySelect>) {
          for_each_subexpr(*n.array, fn);
          for_each_subexpr(*n.index, fn);
        } else if constexpr (std::is_same_v<T, Length>) {
          for_each_subexpr(*n.array, fn);
        } else if constexpr (std::is_same_v<T, IfThenElse>) {
          for_each_subexpr(*n.cond, fn);
          for_each_subexpr(*n.then_expr, fn);
          for_each_subexpr(*n.else_expr, fn);
        } else if constexpr (std::is_same_v<T, Call>) {
          for (const auto& a : n.args) for_each_subexpr(*a, fn);
        } else if constexpr (std::is_same_v<T, Quantifier>) {
          for_each_subexpr(*n.body, fn);
        }
      },
      e.node);
}

void for_each_stmt(const Block& b, const std::function<void(const Stmt&)>& fn) {
  for (const auto& s : b.stmts) {
    fn(*s);
    if (const auto* i = s->as<If>()) {
      for_each_stmt(i->then_block, fn);
      if (i->else_block) for_each_stmt(*i->else_block, fn);
    } else if (const auto* w = s->as<While>()) {
      for_each_stmt(w->body, fn);
    }
  }
}

}  // namespace minidafny::frontend
