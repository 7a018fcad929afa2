#include "minidafny/ir/lower.hpp"

#include <algorithm>
#include <functional>

namespace minidafny::ir {

using namespace frontend;
using logic::Substitution;
using K = ObligationKind;

// ---------------------------------------------------------------------------
// Call graph

CallGraph::CallGraph(const typecheck::TypedProgram& tp) {
  auto calls_in = [](const Expr& e, std::set<std::string>& out) {
    for_each_subexpr(e, [&](const Expr& s) {
      if (const auto* c = s.as<Call>(); c && !c->resolved.empty()) out.insert(c->resolved);
    });
  };
  for (const auto& [q, m] : tp.methods()) {
    auto& out = edges_[q];
    for (const auto& r : m->requires_) calls_in(*r, out);
    for (const auto& en : m->ensures) calls_in(*en, out);
    if (m->decreases) calls_in(*m->decreases, out);
    for_each_stmt(m->body, [&](const Stmt& s) {
      std::visit(
          [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, VarDecl>) {
              if (n.init) calls_in(*n.init, out);
            } else if constexpr (std::is_same_v<T, Assign>) {
              calls_in(*n.rhs, out);
              if (n.index) calls_in(*n.index, out);
            } else if constexpr (std::is_same_v<T, MultiAssignCall>) {
              if (!n.resolved.empty()) out.insert(n.resolved);
              for (const auto& a : n.args) calls_in(*a, out);
            } else if constexpr (std::is_same_v<T, If>) {
              calls_in(*n.cond, out);
            } else if constexpr (std::is_same_v<T, While>) {
              calls_in(*n.guard, out);
              for (const auto& i : n.invariants) calls_in(*i, out);
              if (n.decreases) calls_in(*n.decreases, out);
            } else if constexpr (std::is_same_v<T, Assert>) {
              calls_in(*n.cond, out);
            }
          },
          s.node);
    });
  }
  // A function's ensures may mention the function itself without recursing.
  for (const auto& [q, f] : tp.functions()) {
    auto& out = edges_[q];
    for (const auto& r : f->requires_) calls_in(*r, out);
    calls_in(*f->body, out);
  }

  // Tarjan's strongly connected components.
  std::map<std::string, int> index, low;
  std::vector<std::string> stack;
  std::set<std::string> on_stack;
  int counter = 0, comp = 0;
  std::function<void(const std::string&)> visit = [&](const std::string& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    for (const auto& w : edges_[v]) {
      if (!index.count(w)) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack.count(w)) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::string> members;
      std::string w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        component_[w] = comp;
        members.push_back(w);
      } while (w != v);
      if (members.size() > 1 || edges_[v].count(v))
        for (const auto& m : members) cyclic_.insert(m);
      ++comp;
    }
  };
  std::vector<std::string> nodes;
  for (const auto& [k, _] : edges_) nodes.push_back(k);
  for (const auto& v : nodes)
    if (!index.count(v)) visit(v);
}

bool CallGraph::recursive(const std::string& caller, const std::string& callee) const {
  auto a = component_.find(caller), b = component_.find(callee);
  return a != component_.end() && b != component_.end() && a->second == b->second &&
         cyclic_.count(callee);
}

bool CallGraph::in_cycle(const std::string& decl) const { return cyclic_.count(decl) > 0; }

const std::set<std::string>& CallGraph::callees(const std::string& decl) const {
  static const std::set<std::string> kEmpty;
  auto it = edges_.find(decl);
  return it == edges_.end() ? kEmpty : it->second;
}

// ---------------------------------------------------------------------------
// guess_decreases

std::optional<ExprPtr> guess_decreases(const While& loop) {
  const auto* b = loop.guard->as<Binary>();
  if (!b || !b->lhs->type.is_numeric() || !b->rhs->type.is_numeric()) return std::nullopt;
  const Expr* hi = nullptr;
  const Expr* lo = nullptr;
  switch (b->op) {
    case BinaryOp::Lt:
    case BinaryOp::Le:
      hi = b->rhs.get();
      lo = b->lhs.get();
      break;
    case BinaryOp::Gt:
    case BinaryOp::Ge:
      hi = b->lhs.get();
      lo = b->rhs.get();
      break;
    default:
      return std::nullopt;
  }
  auto d = make_expr(Binary{BinaryOp::Sub, clone(*hi), clone(*lo)}, loop.guard->span);
  d->type = Type::integer();
  return d;
}

// ---------------------------------------------------------------------------
// Lowering

namespace {

const char* describe(K k) {
  switch (k) {
    case K::Postcondition: return "postcondition might not hold";
    case K::PreconditionAtCall: return "precondition for this call might not hold";
    case K::AssertStmt: return "assertion might not hold";
    case K::LoopInvEntry: return "loop invariant might not hold on entry";
    case K::LoopInvMaintained: return "loop invariant might not be maintained by the loop";
    case K::TerminationDecreases: return "decreases expression might not decrease";
    case K::TerminationBounded: return "decreases expression might not be bounded below by 0";
    case K::IndexInBounds: return "index out of range";
    case K::NullDeref: return "target object may be null";
    case K::DivByZero: return "possible division by zero";
    case K::NatNonNegative: return "value assigned to a nat might be negative";
  }
  return "";
}

class Lowerer {
 public:
  Lowerer(Translator& tr, const CallGraph& cg, const typecheck::TypedProgram& tp,
          std::vector<Diagnostic>& diags, std::string decl)
      : tr_(tr), tm_(tr.tm()), cg_(cg), tp_(tp), diags_(diags), decl_(std::move(decl)) {
    g_.name = decl_;
    cur_ = new_block();
  }

  Graph lower(const MethodDecl& m) {
    method_ = &m;
    for (const auto& p : m.ins) declare(p.name, p.type), g_.ins.push_back(p.name);
    for (const auto& p : m.outs) declare(p.name, p.type), g_.outs.push_back(p.name);
    for_each_stmt(m.body, [&](const Stmt& s) {
      if (const auto* v = s.as<VarDecl>()) declare(v->name, v->type);
      if (const auto* c = s.as<MultiAssignCall>(); c && c->declares)
        for (std::size_t i = 0; i < c->lhs.size() && i < c->lhs_types.size(); ++i)
          declare(c->lhs[i], c->lhs_types[i]);
    });

    for (const auto& r : m.requires_) {
      wf(*r, tm_.mk_true());
      emit(Command::assume(tr_.term(*r)));
    }
    if (m.decreases && cg_.in_cycle(decl_)) {
      wf(*m.decreases, tm_.mk_true());
      TermRef snap = tm_.mk_const("$decr0", Sort::Int);
      emit(Command::assign(snap, tr_.term(*m.decreases)));
      caller_measure_ = snap;
    }
    lower_block(m.body);
    if (cur_ >= 0) {
      for (const auto& en : m.ensures) {
        wf(*en, tm_.mk_true());
        obligation(tm_.mk_true(), tr_.term(*en), K::Postcondition, en->span);
      }
    }
    return std::move(g_);
  }

  Graph lower(const FunctionDecl& f) {
    g_.is_function = true;
    for (const auto& p : f.ins) declare(p.name, p.type), g_.ins.push_back(p.name);
    for (const auto& r : f.requires_) {
      wf(*r, tm_.mk_true());
      emit(Command::assume(tr_.term(*r)));
    }
    if (f.decreases && cg_.in_cycle(decl_)) caller_measure_ = tr_.term(*f.decreases);
    wf(*f.body, tm_.mk_true());
    TermRef body = tr_.term(*f.body);
    if (f.return_type.kind == Type::Kind::Nat && f.body->type.kind != Type::Kind::Nat)
      obligation(tm_.mk_true(), tm_.mk_ge(body, tm_.mk_int(0)), K::NatNonNegative, f.body->span,
                 "function result must be a nat");
    const FunctionDef& def = tr_.function(decl_);
    TermRef app = tm_.mk_apply(decl_, def.result, def.params);
    emit(Command::assume(tm_.mk_eq(app, body)));
    termination_checks_ = false;
    for (const auto& en : f.ensures) {
      wf(*en, tm_.mk_true());
      obligation(tm_.mk_true(), tr_.term(*en), K::Postcondition, en->span);
    }
    return std::move(g_);
  }

 private:
  void declare(const std::string& name, const Type& t) { g_.var_types[name] = t; }

  Type type_of(const std::string& name) const {
    auto it = g_.var_types.find(name);
    return it == g_.var_types.end() ? Type::integer() : it->second;
  }

  TermRef var(const std::string& name) { return tr_.var(name, type_of(name)); }

  int new_block() {
    int i = static_cast<int>(g_.blocks.size());
    g_.blocks.push_back(Block{"b" + std::to_string(i), {}, {}});
    preds_.push_back(0);
    return i;
  }

  void edge(int from, int to) {
    if (from < 0) return;
    g_.blocks[from].succs.push_back(to);
    ++preds_[to];
  }

  void emit(Command c) {
    if (cur_ >= 0) g_.blocks[cur_].cmds.push_back(std::move(c));
  }

  // Assert followed by Assume of `guard ==> cond`, closed over the quantifier
  // binders currently in scope.
  void obligation(TermRef guard, TermRef cond, K kind, const Span& span,
                  std::string description = {}) {
    if (cur_ < 0) return;
    TermRef f = tm_.mk_implies(guard, cond);
    for (auto it = binders_.rbegin(); it != binders_.rend(); ++it) f = tm_.mk_forall(*it, f);
    emit(Command::assert_(f, kind, span, description.empty() ? describe(kind) : description));
    emit(Command::assume(f));
  }

  void nat_check(TermRef guard, TermRef value, const Span& span, const std::string& what) {
    obligation(guard, tm_.mk_ge(value, tm_.mk_int(0)), K::NatNonNegative, span,
               "value assigned to " + what + " might be negative");
  }

  void deref_checks(TermRef guard, const Expr& array, TermRef index, const Span& span) {
    TermRef a = tr_.term(array);
    obligation(guard, tm_.mk_ne(a, tm_.mk_null()), K::NullDeref, span);
    if (index)
      obligation(guard,
                 tm_.mk_and(tm_.mk_le(tm_.mk_int(0), index), tm_.mk_lt(index, tm_.mk_length(a))),
                 K::IndexInBounds, span);
  }

  void termination_check(TermRef guard, TermRef callee_measure, const Span& span,
                         const std::string& callee) {
    obligation(guard, tm_.mk_lt(callee_measure, caller_measure_), K::TerminationDecreases, span,
               "decreases expression might not decrease at recursive call to '" + callee + "'");
    obligation(guard, tm_.mk_ge(caller_measure_, tm_.mk_int(0)), K::TerminationBounded, span,
               "decreases expression might not be bounded below by 0 at recursive call to '" +
                   callee + "'");
  }

  // Well-formedness obligations of `e` evaluated under `guard`.
  void wf(const Expr& e, TermRef guard) {
    if (cur_ < 0) return;
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Binary>) {
            wf(*n.lhs, guard);
            switch (n.op) {
              case BinaryOp::And:
              case BinaryOp::Implies:
                wf(*n.rhs, tm_.mk_and(guard, tr_.term(*n.lhs)));
                break;
              case BinaryOp::Or:
                wf(*n.rhs, tm_.mk_and(guard, tm_.mk_not(tr_.term(*n.lhs))));
                break;
              case BinaryOp::Div:
              case BinaryOp::Mod:
                wf(*n.rhs, guard);
                obligation(guard, tm_.mk_ne(tr_.term(*n.rhs), tm_.mk_int(0)), K::DivByZero,
                           e.span);
                break;
              default:
                wf(*n.rhs, guard);
            }
          } else if constexpr (std::is_same_v<T, Unary>) {
            wf(*n.operand, guard);
          } else if constexpr (std::is_same_v<T, ChainedCmp>) {
            for (const auto& o : n.operands) wf(*o, guard);
          } else if constexpr (std::is_same_v<T, ArraySelect>) {
            wf(*n.array, guard);
            wf(*n.index, guard);
            deref_checks(guard, *n.array, tr_.term(*n.index), e.span);
          } else if constexpr (std::is_same_v<T, Length>) {
            wf(*n.array, guard);
            deref_checks(guard, *n.array, nullptr, e.span);
          } else if constexpr (std::is_same_v<T, IfThenElse>) {
            wf(*n.cond, guard);
            TermRef c = tr_.term(*n.cond);
            wf(*n.then_expr, tm_.mk_and(guard, c));
            wf(*n.else_expr, tm_.mk_and(guard, tm_.mk_not(c)));
          } else if constexpr (std::is_same_v<T, Call>) {
            wf_call(e, n, guard);
          } else if constexpr (std::is_same_v<T, Quantifier>) {
            TermRef v = tm_.mk_const(tm_.fresh_name(n.var), Sort::Int);
            tr_.bind(n.var, v);
            binders_.push_back(v);
            wf(*n.body, guard);
            binders_.pop_back();
            tr_.unbind(n.var);
          }
        },
        e.node);
  }

  void wf_call(const Expr& e, const Call& n, TermRef guard) {
    const FunctionDecl* f = tp_.function(n.resolved);
    if (!f) return;
    Substitution sub;
    for (std::size_t i = 0; i < n.args.size() && i < f->ins.size(); ++i) {
      wf(*n.args[i], guard);
      TermRef a = tr_.term(*n.args[i]);
      sub[tr_.var(f->ins[i].name, f->ins[i].type)] = a;
      if (f->ins[i].type.kind == Type::Kind::Nat && n.args[i]->type.kind != Type::Kind::Nat)
        nat_check(guard, a, n.args[i]->span, "nat parameter '" + f->ins[i].name + "'");
    }
    for (const auto& r : f->requires_)
      obligation(guard, tm_.substitute(tr_.term(*r), sub), K::PreconditionAtCall, e.span,
                 "precondition of '" + n.callee + "' might not hold");
    if (termination_checks_ && caller_measure_ && f->decreases && cg_.recursive(decl_, n.resolved))
      termination_check(guard, tm_.substitute(tr_.term(*f->decreases), sub), e.span, n.callee);
  }

  void lower_block(const frontend::Block& b) {
    for (const auto& s : b.stmts) {
      if (cur_ < 0) return;
      lower_stmt(*s);
    }
  }

  void havoc_site(const std::vector<TermRef>& vars, int site, std::vector<TermRef> frame = {}) {
    if (vars.empty()) return;
    Command c;
    c.kind = Command::Kind::Havoc;
    for (TermRef v : vars)
      c.havoc.emplace_back(v, tm_.mk_const(v->name + "@" + std::to_string(site), v->sort));
    c.frame = std::move(frame);
    emit(std::move(c));
  }

  void assume_typing(const std::string& name, TermRef t) {
    if (type_of(name).kind == Type::Kind::Nat) emit(Command::assume(tm_.mk_ge(t, tm_.mk_int(0))));
  }

  void lower_stmt(const Stmt& s) {
    TermRef tt = tm_.mk_true();
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, VarDecl>) {
            TermRef x = var(n.name);
            if (n.init) {
              wf(*n.init, tt);
              TermRef v = tr_.term(*n.init);
              if (n.type.kind == Type::Kind::Nat && n.init->type.kind != Type::Kind::Nat)
                nat_check(tt, v, s.span, "'" + n.name + "'");
              emit(Command::assign(x, v));
            } else {
              havoc_site({x}, s.id);
              assume_typing(n.name, x);
            }
          } else if constexpr (std::is_same_v<T, Assign>) {
            if (n.index) {
              Type at = type_of(n.target);
              wf(*n.index, tt);
              wf(*n.rhs, tt);
              TermRef a = var(n.target);
              TermRef idx = tr_.term(*n.index);
              obligation(tt, tm_.mk_ne(a, tm_.mk_null()), K::NullDeref, n.target_span);
              obligation(tt,
                         tm_.mk_and(tm_.mk_le(tm_.mk_int(0), idx), tm_.mk_lt(idx, tm_.mk_length(a))),
                         K::IndexInBounds, s.span);
              TermRef h = tr_.heap(at.elem);
              emit(Command::heap_store(h, a, idx, tr_.term(*n.rhs)));
            } else {
              wf(*n.rhs, tt);
              TermRef v = tr_.term(*n.rhs);
              if (type_of(n.target).kind == Type::Kind::Nat && n.rhs->type.kind != Type::Kind::Nat)
                nat_check(tt, v, s.span, "'" + n.target + "'");
              emit(Command::assign(var(n.target), v));
            }
          } else if constexpr (std::is_same_v<T, MultiAssignCall>) {
            lower_call(s, n);
          } else if constexpr (std::is_same_v<T, If>) {
            wf(*n.cond, tt);
            TermRef c = tr_.term(*n.cond);
            int then_b = new_block(), else_b = new_block(), join = new_block();
            edge(cur_, then_b);
            edge(cur_, else_b);
            cur_ = then_b;
            emit(Command::assume(c));
            lower_block(n.then_block);
            edge(cur_, join);
            cur_ = else_b;
            emit(Command::assume(tm_.mk_not(c)));
            if (n.else_block) lower_block(*n.else_block);
            edge(cur_, join);
            cur_ = preds_[join] > 0 ? join : -1;
          } else if constexpr (std::is_same_v<T, While>) {
            lower_loop(s, n);
          } else if constexpr (std::is_same_v<T, Assert>) {
            wf(*n.cond, tt);
            obligation(tt, tr_.term(*n.cond), K::AssertStmt, s.span);
          } else if constexpr (std::is_same_v<T, Break>) {
            edge(cur_, break_targets_.back());
            cur_ = -1;
          }
        },
        s.node);
  }

  std::vector<TermRef> frame_refs() {
    std::vector<TermRef> out;
    if (method_)
      for (const auto& id : method_->modifies) out.push_back(var(id.name));
    return out;
  }

  void lower_call(const Stmt& s, const MultiAssignCall& n) {
    const MethodDecl* callee = tp_.method(n.resolved);
    if (!callee) return;
    TermRef tt = tm_.mk_true();
    const std::string site = "@" + std::to_string(s.id);
    Substitution sub;
    for (std::size_t i = 0; i < n.args.size() && i < callee->ins.size(); ++i) {
      const Param& p = callee->ins[i];
      wf(*n.args[i], tt);
      TermRef a = tr_.term(*n.args[i]);
      if (p.type.kind == Type::Kind::Nat && n.args[i]->type.kind != Type::Kind::Nat)
        nat_check(tt, a, n.args[i]->span, "nat parameter '" + p.name + "'");
      TermRef tmp = tm_.mk_const(p.name + site, sort_of(p.type));
      emit(Command::assign(tmp, a));
      sub[tr_.var(p.name, p.type)] = tmp;
    }
    for (const auto& r : callee->requires_)
      obligation(tt, tm_.substitute(tr_.term(*r), sub), K::PreconditionAtCall, s.span,
                 "precondition of '" + n.callee + "' might not hold");
    if (caller_measure_ && callee->decreases && cg_.recursive(decl_, n.resolved))
      termination_check(tt, tm_.substitute(tr_.term(*callee->decreases), sub), s.span, n.callee);

    // The caller forgets the body: outputs and modified heap are arbitrary
    // apart from the callee's postconditions.
    std::vector<TermRef> outs;
    for (const auto& o : callee->outs) {
      TermRef t = tm_.mk_const(o.name + site, sort_of(o.type));
      outs.push_back(t);
      sub[tr_.var(o.name, o.type)] = t;
    }
    if (!outs.empty()) {
      Command c;
      c.kind = Command::Kind::Havoc;
      for (TermRef t : outs) c.havoc.emplace_back(t, t);
      emit(std::move(c));
      for (std::size_t i = 0; i < outs.size(); ++i)
        if (callee->outs[i].type.kind == Type::Kind::Nat)
          emit(Command::assume(tm_.mk_ge(outs[i], tm_.mk_int(0))));
    }
    if (!callee->modifies.empty()) {
      std::vector<TermRef> frame;
      bool ints = false, bools = false;
      for (const auto& id : callee->modifies) {
        for (const auto& p : callee->ins)
          if (p.name == id.name && p.type.is_array()) {
            frame.push_back(sub.at(tr_.var(p.name, p.type)));
            (p.type.elem == Type::Kind::Bool ? bools : ints) = true;
          }
      }
      std::vector<TermRef> heaps;
      if (ints) heaps.push_back(tr_.heap(Type::Kind::Int));
      if (bools) heaps.push_back(tr_.heap(Type::Kind::Bool));
      havoc_site(heaps, s.id, frame);
    }
    for (const auto& en : callee->ensures) emit(Command::assume(tm_.substitute(tr_.term(*en), sub)));

    for (std::size_t i = 0; i < n.lhs.size() && i < outs.size(); ++i) {
      const std::string& x = n.lhs[i];
      if (type_of(x).kind == Type::Kind::Nat && callee->outs[i].type.kind != Type::Kind::Nat)
        nat_check(tt, outs[i], s.span, "'" + x + "'");
      emit(Command::assign(var(x), outs[i]));
    }
  }

  // Variables and heaps a loop body may change.
  void loop_targets(const frontend::Block& body, std::vector<TermRef>& vars, bool& ints,
                    bool& bools) {
    std::set<std::string> names;
    for_each_stmt(body, [&](const Stmt& s) {
      if (const auto* v = s.as<VarDecl>()) names.insert(v->name);
      if (const auto* a = s.as<Assign>()) {
        if (!a->index) {
          names.insert(a->target);
        } else {
          (type_of(a->target).elem == Type::Kind::Bool ? bools : ints) = true;
        }
      }
      if (const auto* c = s.as<MultiAssignCall>()) {
        for (const auto& l : c->lhs) names.insert(l);
        if (const MethodDecl* m = tp_.method(c->resolved))
          for (const auto& id : m->modifies)
            for (const auto& p : m->ins)
              if (p.name == id.name && p.type.is_array())
                (p.type.elem == Type::Kind::Bool ? bools : ints) = true;
      }
    });
    for (const auto& n : names) vars.push_back(var(n));
  }

  void lower_loop(const Stmt& s, const While& w) {
    TermRef tt = tm_.mk_true();
    for (const auto& inv : w.invariants)
      obligation(tt, tr_.term(*inv), K::LoopInvEntry, inv->span);

    std::vector<TermRef> vars;
    bool ints = false, bools = false;
    loop_targets(w.body, vars, ints, bools);
    havoc_site(vars, s.id);
    for (TermRef v : vars) assume_typing(v->name, v);
    std::vector<TermRef> heaps;
    if (ints) heaps.push_back(tr_.heap(Type::Kind::Int));
    if (bools) heaps.push_back(tr_.heap(Type::Kind::Bool));
    havoc_site(heaps, s.id, frame_refs());

    for (const auto& inv : w.invariants) {
      wf(*inv, tt);
      emit(Command::assume(tr_.term(*inv)));
    }
    wf(*w.guard, tt);
    TermRef guard = tr_.term(*w.guard);

    std::optional<ExprPtr> guessed;
    const Expr* measure = w.decreases.get();
    if (!measure) {
      guessed = guess_decreases(w);
      if (guessed) measure = guessed->get();
      else
        diags_.push_back({s.span, Severity::Error, codes::kNoTermination, kNoMeasureMessage});
    }

    int body = new_block(), exit = new_block(), join = new_block();
    edge(cur_, body);
    edge(cur_, exit);

    cur_ = exit;
    emit(Command::assume(tm_.mk_not(guard)));
    edge(cur_, join);

    cur_ = body;
    emit(Command::assume(guard));
    TermRef snap = nullptr;
    if (measure) {
      wf(*measure, tt);
      snap = tm_.mk_const("$decr" + std::to_string(s.id), Sort::Int);
      emit(Command::assign(snap, tr_.term(*measure)));
    }
    break_targets_.push_back(join);
    lower_block(w.body);
    break_targets_.pop_back();
    if (cur_ >= 0) {
      for (const auto& inv : w.invariants)
        obligation(tt, tr_.term(*inv), K::LoopInvMaintained, inv->span);
      if (measure) {
        wf(*measure, tt);
        obligation(tt, tm_.mk_lt(tr_.term(*measure), snap), K::TerminationDecreases,
                   measure->span);
        obligation(tt, tm_.mk_ge(snap, tm_.mk_int(0)), K::TerminationBounded, measure->span);
      }
    }
    cur_ = join;
  }

  Translator& tr_;
  TermManager& tm_;
  const CallGraph& cg_;
  const typecheck::TypedProgram& tp_;
  std::vector<Diagnostic>& diags_;
  std::string decl_;
  const MethodDecl* method_ = nullptr;
  Graph g_;
  std::vector<int> preds_;
  int cur_ = -1;
  std::vector<TermRef> binders_;
  std::vector<int> break_targets_;
  TermRef caller_measure_ = nullptr;
  bool termination_checks_ = true;
};

void measure_diagnostic(const CallGraph& cg, const std::string& q, bool has_measure,
                        const Span& span, std::vector<Diagnostic>& diags) {
  if (cg.in_cycle(q) && !has_measure)
    diags.push_back({span, Severity::Error, codes::kNoTermination,
                     "recursive declaration '" + q + "' needs a decreases clause"});
}

}  // namespace

Graph lower_method(const MethodDecl& m, Translator& tr, const CallGraph& cg,
                   const typecheck::TypedProgram& tp, std::vector<Diagnostic>& diags) {
  measure_diagnostic(cg, m.qualified, m.decreases != nullptr, m.name_span, diags);
  return Lowerer(tr, cg, tp, diags, m.qualified).lower(m);
}

Graph lower_function(const FunctionDecl& f, Translator& tr, const CallGraph& cg,
                     const typecheck::TypedProgram& tp, std::vector<Diagnostic>& diags) {
  measure_diagnostic(cg, f.qualified, f.decreases != nullptr, f.name_span, diags);
  return Lowerer(tr, cg, tp, diags, f.qualified).lower(f);
}

LoweredProgram lower_program(const typecheck::TypedProgram& tp, Translator& tr) {
  LoweredProgram out;
  CallGraph cg(tp);
  for (const DeclRef& d : declarations_in_order(tp.program())) {
    if (d.method) out.graphs.push_back(lower_method(*d.method, tr, cg, tp, out.diagnostics));
    else out.graphs.push_back(lower_function(*d.function, tr, cg, tp, out.diagnostics));
  }
  return out;
}

}  // namespace minidafny::ir
