#include "minidafny/typecheck/checker.hpp"

#include <set>

namespace minidafny::typecheck {

using namespace frontend;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct Symbol {
  Type type;
  SymbolKind kind;
  bool ghost = false;
};

class Checker {
 public:
  explicit Checker(Program& prog) : prog_(prog) {}

  std::vector<Diagnostic> run() {
    collect_declarations();
    for (auto& c : prog_.classes) {
      cls_ = c.name;
      for (auto& m : c.methods) check_method(m);
      for (auto& f : c.functions) check_function(f);
    }
    cls_.clear();
    for (auto& m : prog_.methods) check_method(m);
    for (auto& f : prog_.functions) check_function(f);
    return std::move(diags_);
  }

 private:
  // ---- diagnostics ---------------------------------------------------------
  void error(const Span& s, const char* code, std::string msg) {
    diags_.push_back(Diagnostic{s, Severity::Error, code, std::move(msg)});
  }
  void warning(const Span& s, const char* code, std::string msg) {
    diags_.push_back(Diagnostic{s, Severity::Warning, code, std::move(msg)});
  }

  // ---- declarations --------------------------------------------------------
  void collect_declarations() {
    auto add = [&](const std::string& scope_key, const std::string& name, const Span& span,
                   std::set<std::string>& seen) {
      if (!seen.insert(name).second)
        error(span, codes::kDuplicateName,
              "duplicate declaration of '" + name + "'" +
                  (scope_key.empty() ? "" : " in class '" + scope_key + "'"));
    };
    std::set<std::string> classes;
    for (auto& c : prog_.classes) {
      if (!classes.insert(c.name).second)
        error(c.span, codes::kDuplicateName, "duplicate class '" + c.name + "'");
      std::set<std::string> seen;
      for (auto& m : c.methods) {
        add(c.name, m.name, m.name_span, seen);
        methods_.emplace(m.qualified, &m);
      }
      for (auto& f : c.functions) {
        add(c.name, f.name, f.name_span, seen);
        functions_.emplace(f.qualified, &f);
      }
    }
    std::set<std::string> seen;
    for (auto& m : prog_.methods) {
      add("", m.name, m.name_span, seen);
      methods_.emplace(m.qualified, &m);
    }
    for (auto& f : prog_.functions) {
      add("", f.name, f.name_span, seen);
      functions_.emplace(f.qualified, &f);
    }
  }

  // Resolves a callee name from inside the current class, falling back to the
  // top level.
  std::string resolve_callee(const std::string& name, bool& is_method, bool& found) const {
    found = true;
    for (const std::string& q : {cls_.empty() ? name : cls_ + "." + name, name}) {
      if (methods_.count(q)) {
        is_method = true;
        return q;
      }
      if (functions_.count(q)) {
        is_method = false;
        return q;
      }
    }
    found = false;
    return {};
  }

  // ---- scopes --------------------------------------------------------------
  void push_scope() { scopes_.emplace_back(); }
  void pop_scope() { scopes_.pop_back(); }

  const Symbol* lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return &f->second;
    }
    return nullptr;
  }

  bool declare(const std::string& name, Symbol sym, const Span& span) {
    if (!method_names_.insert(name).second) {
      error(span, codes::kDuplicateName, "'" + name + "' is already declared in this scope");
      return false;
    }
    scopes_.back()[name] = sym;
    return true;
  }

  // ---- expressions ---------------------------------------------------------
  void expect_bool(const Expr& e, const char* what) {
    if (!e.type.is_error() && !e.type.is_bool())
      error(e.span, codes::kTypeMismatch,
            std::string(what) + " must be of type bool, found " + e.type.str());
  }
  void expect_numeric(const Expr& e, const char* what) {
    if (!e.type.is_error() && !e.type.is_numeric())
      error(e.span, codes::kTypeMismatch,
            std::string(what) + " must be of type int, found " + e.type.str());
  }

  Type check_expr(Expr& e) {
    e.type = std::visit(
        overloaded{
            [&](IntLit& n) { return n.value >= 0 ? Type::natural() : Type::integer(); },
            [&](BoolLit&) { return Type::boolean(); },
            [&](NullLit&) { return Type::null_type(); },
            [&](VarRef& n) {
              const Symbol* s = lookup(n.name);
              if (!s) {
                error(e.span, codes::kUnknownIdent, "unknown identifier '" + n.name + "'");
                return Type::error();
              }
              n.binding = s->kind;
              n.ghost = s->ghost;
              return s->type;
            },
            [&](Binary& n) { return check_binary(e, n); },
            [&](Unary& n) {
              Type t = check_expr(*n.operand);
              if (n.op == UnaryOp::Not) {
                expect_bool(*n.operand, "operand of '!'");
                return Type::boolean();
              }
              expect_numeric(*n.operand, "operand of unary '-'");
              (void)t;
              return Type::integer();
            },
            [&](ChainedCmp& n) {
              for (auto& o : n.operands) {
                check_expr(*o);
                expect_numeric(*o, "operand of a comparison chain");
              }
              return Type::boolean();
            },
            [&](ArraySelect& n) {
              Type a = check_expr(*n.array);
              check_expr(*n.index);
              expect_numeric(*n.index, "array index");
              if (a.is_error()) return Type::error();
              if (!a.is_array()) {
                error(n.array->span, codes::kNotArray,
                      "cannot index a value of type " + a.str());
                return Type::error();
              }
              return Type{a.elem, Type::Kind::Error};
            },
            [&](Length& n) {
              Type a = check_expr(*n.array);
              if (a.is_error()) return Type::error();
              if (!a.is_array()) {
                error(n.array->span, codes::kNotArray,
                      "'.Length' requires an array, found " + a.str());
                return Type::error();
              }
              return Type::natural();
            },
            [&](IfThenElse& n) {
              check_expr(*n.cond);
              expect_bool(*n.cond, "if-then-else condition");
              Type t = check_expr(*n.then_expr);
              Type f = check_expr(*n.else_expr);
              if (t.is_error() || f.is_error()) return Type::error();
              if (t.kind == Type::Kind::Nat && f.kind == Type::Kind::Nat) return Type::natural();
              if (t.is_numeric() && f.is_numeric()) return Type::integer();
              if (t.is_bool() && f.is_bool()) return Type::boolean();
              if (t.is_reference() && f.is_reference()) {
                if (t.is_array() && f.is_array() && t.elem != f.elem) {
                  error(e.span, codes::kTypeMismatch, "branches have different array types");
                  return Type::error();
                }
                return t.is_array() ? t : f;
              }
              error(e.span, codes::kTypeMismatch,
                    "if-then-else branches have incompatible types " + t.str() + " and " +
                        f.str());
              return Type::error();
            },
            [&](Call& n) { return check_call_expr(e, n); },
            [&](Quantifier& n) {
              push_scope();
              // Bound variables may shadow nothing; keep them out of the
              // method-wide uniqueness set.
              scopes_.back()[n.var] = Symbol{Type::integer(), SymbolKind::BoundVar, false};
              check_expr(*n.body);
              expect_bool(*n.body, "quantifier body");
              pop_scope();
              return Type::boolean();
            },
        },
        e.node);
    return e.type;
  }

  Type check_binary(Expr& e, Binary& n) {
    Type l = check_expr(*n.lhs);
    Type r = check_expr(*n.rhs);
    switch (n.op) {
      case BinaryOp::Add:
      case BinaryOp::Sub:
      case BinaryOp::Mul:
      case BinaryOp::Div:
      case BinaryOp::Mod:
        expect_numeric(*n.lhs, "arithmetic operand");
        expect_numeric(*n.rhs, "arithmetic operand");
        return Type::integer();
      case BinaryOp::Lt:
      case BinaryOp::Le:
      case BinaryOp::Gt:
      case BinaryOp::Ge:
        expect_numeric(*n.lhs, "comparison operand");
        expect_numeric(*n.rhs, "comparison operand");
        return Type::boolean();
      case BinaryOp::Eq:
      case BinaryOp::Ne: {
        if (l.is_error() || r.is_error()) return Type::boolean();
        bool ok = (l.is_numeric() && r.is_numeric()) || (l.is_bool() && r.is_bool()) ||
                  (l.is_reference() && r.is_reference() &&
                   !(l.is_array() && r.is_array() && l.elem != r.elem));
        if (!ok)
          error(e.span, codes::kTypeMismatch,
                "cannot compare " + l.str() + " with " + r.str());
        return Type::boolean();
      }
      case BinaryOp::And:
      case BinaryOp::Or:
      case BinaryOp::Implies:
      case BinaryOp::Iff:
        expect_bool(*n.lhs, "logical operand");
        expect_bool(*n.rhs, "logical operand");
        return Type::boolean();
    }
    return Type::error();
  }

  Type check_call_expr(Expr& e, Call& n) {
    for (auto& a : n.args) check_expr(*a);
    bool is_method = false, found = false;
    std::string q = resolve_callee(n.callee, is_method, found);
    if (!found) {
      error(e.span, codes::kUnknownIdent, "unknown function '" + n.callee + "'");
      return Type::error();
    }
    if (is_method) {
      error(e.span, codes::kMethodInExpr,
            "method '" + n.callee + "' cannot be called inside an expression");
      return Type::error();
    }
    n.resolved = q;
    const FunctionDecl* f = functions_.at(q);
    check_args(e.span, n.callee, f->ins, n.args);
    return f->return_type;
  }

  void check_args(const Span& span, const std::string& callee, const std::vector<Param>& params,
                  std::vector<ExprPtr>& args) {
    if (params.size() != args.size()) {
      error(span, codes::kArity,
            "'" + callee + "' expects " + std::to_string(params.size()) + " argument(s), got " +
                std::to_string(args.size()));
      return;
    }
    for (std::size_t i = 0; i < args.size(); ++i)
      if (!assignable(params[i].type, args[i]->type))
        error(args[i]->span, codes::kTypeMismatch,
              "argument " + std::to_string(i + 1) + " of '" + callee + "' has type " +
                  args[i]->type.str() + ", expected " + params[i].type.str());
  }

  // ---- statements ----------------------------------------------------------
  const Call* top_level_method_call(const ExprPtr& e) {
    if (!e) return nullptr;
    const Call* c = e->as<Call>();
    if (!c) return nullptr;
    bool is_method = false, found = false;
    resolve_callee(c->callee, is_method, found);
    return (found && is_method) ? c : nullptr;
  }

  void check_assign_target(const std::string& name, const Span& span, Type& out_type) {
    const Symbol* s = lookup(name);
    if (!s) {
      error(span, codes::kUnknownIdent, "unknown identifier '" + name + "'");
      out_type = Type::error();
      return;
    }
    out_type = s->type;
    if (s->kind == SymbolKind::InParam)
      error(span, codes::kAssignToInput, "cannot assign to input parameter '" + name + "'");
    else if (s->kind == SymbolKind::BoundVar)
      error(span, codes::kTypeMismatch, "cannot assign to bound variable '" + name + "'");
  }

  void check_method_call(Stmt& s, MultiAssignCall& c) {
    for (auto& a : c.args) check_expr(*a);
    bool is_method = false, found = false;
    std::string q = resolve_callee(c.callee, is_method, found);
    if (!found) {
      error(s.span, codes::kUnknownIdent, "unknown method '" + c.callee + "'");
      return;
    }
    if (!is_method) {
      error(s.span, codes::kTypeMismatch,
            "'" + c.callee + "' is a function; only methods can be called as statements");
      return;
    }
    c.resolved = q;
    const MethodDecl* m = methods_.at(q);
    check_args(s.span, c.callee, m->ins, c.args);
    if (c.lhs.size() != m->outs.size()) {
      error(s.span, codes::kArity,
            "method '" + c.callee + "' returns " + std::to_string(m->outs.size()) +
                " value(s) but " + std::to_string(c.lhs.size()) + " target(s) were given");
      return;
    }
    c.lhs_types.clear();
    for (std::size_t i = 0; i < c.lhs.size(); ++i) {
      Type t;
      if (c.declares) {
        t = m->outs[i].type;
        declare(c.lhs[i], Symbol{t, SymbolKind::Local, c.ghost}, s.span);
      } else {
        check_assign_target(c.lhs[i], s.span, t);
        if (!assignable(t, m->outs[i].type))
          error(s.span, codes::kTypeMismatch,
                "cannot assign " + m->outs[i].type.str() + " result to '" + c.lhs[i] +
                    "' of type " + t.str());
      }
      c.lhs_types.push_back(t);
    }
  }

  void check_block(Block& b) {
    push_scope();
    for (auto& s : b.stmts) check_stmt(*s);
    pop_scope();
  }

  void check_stmt(Stmt& s) {
    // Rewrite `var x := M(..)` and `x := M(..)` into call statements first.
    if (auto* v = s.as<VarDecl>(); v && top_level_method_call(v->init)) {
      Call* call = v->init->as<Call>();
      MultiAssignCall c;
      c.lhs = {v->name};
      c.declares = true;
      c.ghost = v->ghost;
      c.callee = call->callee;
      c.args = std::move(call->args);
      if (v->declared)
        error(s.span, codes::kUnsupported,
              "type annotations on call results are not supported; remove ': " +
                  v->declared->str() + "'");
      s.node = std::move(c);
    } else if (auto* a = s.as<Assign>(); a && !a->index && top_level_method_call(a->rhs)) {
      Call* call = a->rhs->as<Call>();
      MultiAssignCall c;
      c.lhs = {a->target};
      c.callee = call->callee;
      c.args = std::move(call->args);
      s.node = std::move(c);
    }

    std::visit(
        overloaded{
            [&](VarDecl& v) {
              Type t = Type::error();
              if (v.init) {
                Type it = check_expr(*v.init);
                if (v.declared) {
                  t = *v.declared;
                  if (!assignable(t, it))
                    error(v.init->span, codes::kTypeMismatch,
                          "cannot initialize '" + v.name + "' of type " + t.str() +
                              " with a value of type " + it.str());
                } else if (it.kind == Type::Kind::Null) {
                  error(s.span, codes::kTypeMismatch,
                        "cannot infer the type of '" + v.name + "' from 'null'");
                } else {
                  // Only non-negative literals infer nat.
                  t = (it.kind == Type::Kind::Nat && !v.init->as<IntLit>()) ? Type::integer()
                                                                            : it;
                }
              } else if (v.declared) {
                t = *v.declared;
              } else {
                error(s.span, codes::kTypeMismatch,
                      "variable '" + v.name + "' needs a type or an initializer");
              }
              v.type = t;
              declare(v.name, Symbol{t, SymbolKind::Local, v.ghost}, s.span);
            },
            [&](Assign& a) {
              Type rt = check_expr(*a.rhs);
              if (a.index) {
                const Symbol* sym = lookup(a.target);
                check_expr(*a.index);
                expect_numeric(*a.index, "array index");
                if (!sym) {
                  error(a.target_span, codes::kUnknownIdent,
                        "unknown identifier '" + a.target + "'");
                  return;
                }
                if (!sym->type.is_array()) {
                  if (!sym->type.is_error())
                    error(a.target_span, codes::kNotArray,
                          "cannot index a value of type " + sym->type.str());
                  return;
                }
                Type elem{sym->type.elem, Type::Kind::Error};
                if (!assignable(elem, rt))
                  error(a.rhs->span, codes::kTypeMismatch,
                        "cannot store " + rt.str() + " into " + sym->type.str());
                return;
              }
              Type t;
              check_assign_target(a.target, a.target_span, t);
              if (!assignable(t, rt))
                error(a.rhs->span, codes::kTypeMismatch,
                      "cannot assign " + rt.str() + " to '" + a.target + "' of type " + t.str());
            },
            [&](MultiAssignCall& c) { check_method_call(s, c); },
            [&](If& i) {
              check_expr(*i.cond);
              expect_bool(*i.cond, "if condition");
              check_block(i.then_block);
              if (i.else_block) check_block(*i.else_block);
            },
            [&](While& w) {
              check_expr(*w.guard);
              expect_bool(*w.guard, "loop guard");
              for (auto& inv : w.invariants) {
                check_expr(*inv);
                expect_bool(*inv, "loop invariant");
              }
              if (w.decreases) {
                check_expr(*w.decreases);
                expect_numeric(*w.decreases, "decreases clause");
              }
              ++loop_depth_;
              check_block(w.body);
              --loop_depth_;
            },
            [&](Assert& a) {
              check_expr(*a.cond);
              expect_bool(*a.cond, "assertion");
            },
            [&](Break&) {
              if (loop_depth_ == 0)
                error(s.span, codes::kBreakOutsideLoop, "'break' outside of a loop");
            },
        },
        s.node);
  }

  void check_frame_names(const std::vector<Ident>& ids, const std::vector<Param>& params,
                         const std::vector<Param>* outs, const char* clause) {
    for (const auto& id : ids) {
      const Param* p = nullptr;
      for (const auto& q : params)
        if (q.name == id.name) p = &q;
      if (outs)
        for (const auto& q : *outs)
          if (q.name == id.name) p = &q;
      if (!p) {
        error(id.span, codes::kUnknownIdent,
              std::string(clause) + " clause names unknown parameter '" + id.name + "'");
      } else if (!p->type.is_array()) {
        error(id.span, codes::kNotArray,
              std::string(clause) + " clause must name arrays; '" + id.name + "' has type " +
                  p->type.str());
      }
    }
  }

  void declare_params(const std::vector<Param>& ps, SymbolKind kind) {
    for (const auto& p : ps) declare(p.name, Symbol{p.type, kind, false}, p.span);
  }

  void check_method(MethodDecl& m) {
    method_names_.clear();
    scopes_.clear();
    push_scope();
    declare_params(m.ins, SymbolKind::InParam);
    for (auto& r : m.requires_) {
      check_expr(*r);
      expect_bool(*r, "precondition");
    }
    if (m.decreases) {
      check_expr(*m.decreases);
      expect_numeric(*m.decreases, "decreases clause");
    }
    declare_params(m.outs, SymbolKind::OutParam);
    for (auto& en : m.ensures) {
      check_expr(*en);
      expect_bool(*en, "postcondition");
    }
    check_frame_names(m.modifies, m.ins, &m.outs, "modifies");
    if (!m.reads.empty())
      warning(m.reads.front().span, codes::kReadsOnMethod,
              "methods may read any memory location; 'reads' clause ignored");
    loop_depth_ = 0;
    check_block(m.body);
    pop_scope();
  }

  void check_function(FunctionDecl& f) {
    method_names_.clear();
    scopes_.clear();
    push_scope();
    declare_params(f.ins, SymbolKind::InParam);
    for (auto& r : f.requires_) {
      check_expr(*r);
      expect_bool(*r, "precondition");
    }
    for (auto& en : f.ensures) {
      check_expr(*en);
      expect_bool(*en, "postcondition");
    }
    if (f.decreases) {
      check_expr(*f.decreases);
      expect_numeric(*f.decreases, "decreases clause");
    }
    check_frame_names(f.reads, f.ins, nullptr, "reads");
    Type bt = check_expr(*f.body);
    if (!assignable(f.return_type, bt))
      error(f.body->span, codes::kTypeMismatch,
            "function body has type " + bt.str() + ", expected " + f.return_type.str());
    pop_scope();
  }

  Program& prog_;
  std::string cls_;
  std::map<std::string, const MethodDecl*> methods_;
  std::map<std::string, const FunctionDecl*> functions_;
  std::vector<std::map<std::string, Symbol>> scopes_;
  std::set<std::string> method_names_;
  int loop_depth_ = 0;
  std::vector<Diagnostic> diags_;
};

}  // namespace

TypedProgram::TypedProgram(std::unique_ptr<Program> program) : program_(std::move(program)) {
  for_each_decl(
      std::as_const(*program_), [&](const MethodDecl& m) { methods_.emplace(m.qualified, &m); },
      [&](const FunctionDecl& f) { functions_.emplace(f.qualified, &f); });
}

const MethodDecl* TypedProgram::method(const std::string& qualified) const {
  auto it = methods_.find(qualified);
  return it == methods_.end() ? nullptr : it->second;
}

const FunctionDecl* TypedProgram::function(const std::string& qualified) const {
  auto it = functions_.find(qualified);
  return it == functions_.end() ? nullptr : it->second;
}

CheckResult resolve_and_check(Program program) {
  auto owned = std::make_unique<Program>(std::move(program));
  CheckResult r;
  r.diagnostics = Checker(*owned).run();
  if (!has_errors(r.diagnostics)) r.typed.emplace(std::move(owned));
  return r;
}

}  // namespace minidafny::typecheck
