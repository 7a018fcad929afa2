#include "minidafny/frontend/printer.hpp"

#include <sstream>

namespace minidafny::frontend {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

enum Prec : int {
  kLowest = 0,  // if-then-else and quantifiers extend as far right as possible
  kIff = 1,
  kImplies = 2,
  kOr = 3,
  kAnd = 4,
  kRel = 5,
  kAdd = 6,
  kMul = 7,
  kUnary = 8,
  kPostfix = 9,
};

int precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::Iff: return kIff;
    case BinaryOp::Implies: return kImplies;
    case BinaryOp::Or: return kOr;
    case BinaryOp::And: return kAnd;
    case BinaryOp::Add:
    case BinaryOp::Sub: return kAdd;
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod: return kMul;
    default: return kRel;
  }
}

int precedence(const Expr& e) {
  return std::visit(overloaded{
                        [](const Binary& b) { return precedence(b.op); },
                        [](const ChainedCmp&) { return static_cast<int>(kRel); },
                        [](const Unary&) { return static_cast<int>(kUnary); },
                        [](const IfThenElse&) { return static_cast<int>(kLowest); },
                        [](const Quantifier&) { return static_cast<int>(kLowest); },
                        [](const auto&) { return static_cast<int>(kPostfix); },
                    },
                    e.node);
}

void emit(std::ostream& os, const Expr& e, int required);

void emit_child(std::ostream& os, const Expr& e, int required) {
  if (precedence(e) < required) {
    os << '(';
    emit(os, e, kLowest);
    os << ')';
  } else {
    emit(os, e, required);
  }
}

void emit(std::ostream& os, const Expr& e, int /*required*/) {
  std::visit(overloaded{
                 [&](const IntLit& n) { os << n.value; },
                 [&](const BoolLit& n) { os << (n.value ? "true" : "false"); },
                 [&](const NullLit&) { os << "null"; },
                 [&](const VarRef& n) { os << n.name; },
                 [&](const Binary& n) {
                   int p = precedence(n.op);
                   int left = p, right = p + 1;
                   if (n.op == BinaryOp::Implies) {
                     left = p + 1;
                     right = p;
                   } else if (p == kRel) {
                     left = right = kAdd;
                   }
                   // A trailing if-then-else / quantifier would swallow the rest.
                   emit_child(os, *n.lhs, std::max(left, 1));
                   os << ' ' << spelling(n.op) << ' ';
                   emit_child(os, *n.rhs, std::max(right, 1));
                 },
                 [&](const Unary& n) {
                   os << (n.op == UnaryOp::Not ? "!" : "-");
                   emit_child(os, *n.operand, kUnary);
                 },
                 [&](const ChainedCmp& n) {
                   for (std::size_t i = 0; i < n.operands.size(); ++i) {
                     if (i > 0) os << ' ' << spelling(n.ops[i - 1]) << ' ';
                     emit_child(os, *n.operands[i], kAdd);
                   }
                 },
                 [&](const ArraySelect& n) {
                   emit_child(os, *n.array, kPostfix);
                   os << '[';
                   emit(os, *n.index, kLowest);
                   os << ']';
                 },
                 [&](const Length& n) {
                   emit_child(os, *n.array, kPostfix);
                   os << ".Length";
                 },
                 [&](const IfThenElse& n) {
                   os << "if ";
                   emit(os, *n.cond, kLowest);
                   os << " then ";
                   emit(os, *n.then_expr, kLowest);
                   os << " else ";
                   emit(os, *n.else_expr, kLowest);
                 },
                 [&](const Call& n) {
                   os << n.callee << '(';
                   for (std::size_t i = 0; i < n.args.size(); ++i) {
                     if (i) os << ", ";
                     emit(os, *n.args[i], kLowest);
                   }
                   os << ')';
                 },
                 [&](const Quantifier& n) {
                   os << (n.universal ? "forall " : "exists ") << n.var << " :: ";
                   emit(os, *n.body, kLowest);
                 },
             },
             e.node);
}

class ProgramPrinter {
 public:
  std::string run(const Program& p) {
    bool first = true;
    auto sep = [&] {
      if (!first) os_ << '\n';
      first = false;
    };
    for (const auto& c : p.classes) {
      sep();
      os_ << "class " << c.name << " {\n";
      depth_ = 1;
      bool inner_first = true;
      for (const auto& m : c.methods) {
        if (!inner_first) os_ << '\n';
        inner_first = false;
        method(m);
      }
      for (const auto& f : c.functions) {
        if (!inner_first) os_ << '\n';
        inner_first = false;
        function(f);
      }
      depth_ = 0;
      os_ << "}\n";
    }
    for (const auto& m : p.methods) {
      sep();
      method(m);
    }
    for (const auto& f : p.functions) {
      sep();
      function(f);
    }
    return os_.str();
  }

 private:
  void indent() {
    for (int i = 0; i < depth_; ++i) os_ << "  ";
  }

  void params(const std::vector<Param>& ps) {
    os_ << '(';
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (i) os_ << ", ";
      os_ << ps[i].name << ": " << to_source(ps[i].type);
    }
    os_ << ')';
  }

  void frame(const char* kw, const std::vector<Ident>& ids) {
    if (ids.empty()) return;
    indent();
    os_ << "  " << kw << ' ';
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i) os_ << ", ";
      os_ << ids[i].name;
    }
    os_ << ";\n";
  }

  void clauses(const char* kw, const std::vector<ExprPtr>& es) {
    for (const auto& e : es) {
      indent();
      os_ << "  " << kw << ' ' << to_source(*e) << ";\n";
    }
  }

  void method(const MethodDecl& m) {
    indent();
    os_ << "method " << m.name;
    params(m.ins);
    if (!m.outs.empty()) {
      os_ << " returns ";
      params(m.outs);
    }
    os_ << '\n';
    clauses("requires", m.requires_);
    frame("modifies", m.modifies);
    frame("reads", m.reads);
    clauses("ensures", m.ensures);
    if (m.decreases) {
      indent();
      os_ << "  decreases " << to_source(*m.decreases) << ";\n";
    }
    block(m.body);
    os_ << '\n';
  }

  void function(const FunctionDecl& f) {
    indent();
    os_ << "function " << (f.is_function_method ? "method " : "") << f.name;
    params(f.ins);
    os_ << ": " << to_source(f.return_type) << '\n';
    clauses("requires", f.requires_);
    frame("reads", f.reads);
    clauses("ensures", f.ensures);
    if (f.decreases) {
      indent();
      os_ << "  decreases " << to_source(*f.decreases) << ";\n";
    }
    indent();
    os_ << "{\n";
    ++depth_;
    indent();
    os_ << to_source(*f.body) << '\n';
    --depth_;
    indent();
    os_ << "}\n";
  }

  void block(const Block& b) {
    indent();
    os_ << "{\n";
    ++depth_;
    for (const auto& s : b.stmts) stmt(*s);
    --depth_;
    indent();
    os_ << '}';
  }

  void stmt(const Stmt& s) {
    indent();
    std::visit(overloaded{
                   [&](const VarDecl& v) {
                     if (v.ghost) os_ << "ghost ";
                     os_ << "var " << v.name;
                     if (v.declared) os_ << ": " << to_source(*v.declared);
                     if (v.init) os_ << " := " << to_source(*v.init);
                     os_ << ";\n";
                   },
                   [&](const Assign& a) {
                     os_ << a.target;
                     if (a.index) os_ << '[' << to_source(*a.index) << ']';
                     os_ << " := " << to_source(*a.rhs) << ";\n";
                   },
                   [&](const MultiAssignCall& c) {
                     if (c.declares) os_ << (c.ghost ? "ghost var " : "var ");
                     for (std::size_t i = 0; i < c.lhs.size(); ++i) {
                       if (i) os_ << ", ";
                       os_ << c.lhs[i];
                     }
                     if (!c.lhs.empty()) os_ << " := ";
                     os_ << c.callee << '(';
                     for (std::size_t i = 0; i < c.args.size(); ++i) {
                       if (i) os_ << ", ";
                       os_ << to_source(*c.args[i]);
                     }
                     os_ << ");\n";
                   },
                   [&](const If& i) {
                     os_ << "if " << to_source(*i.cond) << '\n';
                     block(i.then_block);
                     if (i.else_block) {
                       os_ << '\n';
                       indent();
                       os_ << "else\n";
                       block(*i.else_block);
                     }
                     os_ << '\n';
                   },
                   [&](const While& w) {
                     os_ << "while " << to_source(*w.guard) << '\n';
                     for (const auto& inv : w.invariants) {
                       indent();
                       os_ << "  invariant " << to_source(*inv) << ";\n";
                     }
                     if (w.decreases) {
                       indent();
                       os_ << "  decreases " << to_source(*w.decreases) << ";\n";
                     }
                     block(w.body);
                     os_ << '\n';
                   },
                   [&](const Assert& a) { os_ << "assert " << to_source(*a.cond) << ";\n"; },
                   [&](const Break&) { os_ << "break;\n"; },
               },
               s.node);
  }

  std::ostringstream os_;
  int depth_ = 0;
};

}  // namespace

std::string to_source(const Expr& e) {
  std::ostringstream os;
  emit(os, e, kLowest);
  return os.str();
}

std::string to_source(const Program& p) { return ProgramPrinter{}.run(p); }

std::string to_source(const Type& t) { return t.str(); }

}  // namespace minidafny::frontend
