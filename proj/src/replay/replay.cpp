#include "minidafny/replay/replay.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "minidafny/ir/lower.hpp"

namespace minidafny::replay {

namespace {

using namespace frontend;
using K = ir::ObligationKind;
using prover::Model;

struct Stop {
  Outcome outcome;
};

struct Slot {
  std::int64_t v = 0;
  Type type;
};
using Env = std::map<std::string, Slot>;

enum class Flow { Normal, Break };

constexpr std::int64_t kMaxArrayLength = 1000000;
constexpr std::int64_t kMaxDenseRange = 4096;

[[noreturn]] void not_reproduced(std::string detail) {
  throw Stop{{Outcome::Kind::NotReproduced, K::AssertStmt, {}, std::move(detail)}};
}

std::string where(const Span& s) {
  return std::to_string(s.start_line) + ":" + std::to_string(s.start_col);
}

std::string heap_name(bool bools, const std::string& site = {}) {
  return (bools ? "$heapb" : "$heap") + site;
}

class Interpreter {
 public:
  Interpreter(const typecheck::TypedProgram& tp, const Model& m, const Target& t,
              const ReplayOptions& o, std::string decl)
      : tp_(tp), cg_(tp), m_(m), target_(t), opts_(o), decl_(std::move(decl)) {}

  Outcome run(const MethodDecl& md) {
    try {
      method_ = &md;
      collect_types(md);
      Env env;
      for (const auto& p : md.ins) env[p.name] = input(p.name, p.type);
      for (const auto& p : md.outs) env[p.name] = {load(p.name, p.type, heap_name(p.type.elem == Type::Kind::Bool)), p.type};
      for (const auto& r : md.requires_)
        if (!truth(*r, env)) not_reproduced("precondition does not hold for the model's inputs");
      if (md.decreases && cg_.in_cycle(decl_)) caller_measure_ = eval(*md.decreases, env);
      exec_block(md.body, env);
      for (const auto& en : md.ensures) check(truth(*en, env), K::Postcondition, en->span);
      not_reproduced("obligation holds on the replayed path");
    } catch (const Stop& s) {
      return s.outcome;
    }
  }

  Outcome run(const FunctionDecl& fd) {
    try {
      Env env;
      for (const auto& p : fd.ins) env[p.name] = input(p.name, p.type);
      for (const auto& r : fd.requires_)
        if (!truth(*r, env)) not_reproduced("precondition does not hold for the model's inputs");
      if (fd.decreases && cg_.in_cycle(decl_)) caller_measure_ = quiet_eval(*fd.decreases, env);
      std::int64_t result = eval(*fd.body, env);
      if (fd.return_type.kind == Type::Kind::Nat && fd.body->type.kind != Type::Kind::Nat)
        check(result >= 0, K::NatNonNegative, fd.body->span);
      termination_checks_ = false;
      for (const auto& en : fd.ensures) check(truth(*en, env), K::Postcondition, en->span);
      not_reproduced("obligation holds for the function body");
    } catch (const Stop& s) {
      return s.outcome;
    }
  }

 private:
  // ---- state ---------------------------------------------------------------

  void collect_types(const MethodDecl& md) {
    for (const auto& p : md.ins) var_types_[p.name] = p.type;
    for (const auto& p : md.outs) var_types_[p.name] = p.type;
    for_each_stmt(md.body, [&](const Stmt& s) {
      if (const auto* v = s.as<VarDecl>()) var_types_[v->name] = v->type;
      if (const auto* c = s.as<MultiAssignCall>(); c && c->declares)
        for (std::size_t i = 0; i < c->lhs.size() && i < c->lhs_types.size(); ++i)
          var_types_[c->lhs[i]] = c->lhs_types[i];
    });
  }

  Type type_of(const std::string& name, const Env& env) const {
    if (auto it = env.find(name); it != env.end()) return it->second.type;
    auto it = var_types_.find(name);
    return it == var_types_.end() ? Type::integer() : it->second;
  }

  std::optional<std::int64_t> lookup(const std::string& key, const Type& t) const {
    if (t.is_bool()) {
      auto it = m_.bools.find(key);
      if (it != m_.bools.end()) return it->second ? 1 : 0;
      return std::nullopt;
    }
    auto it = m_.ints.find(key);
    if (it != m_.ints.end()) return it->second;
    return std::nullopt;
  }

  Slot input(const std::string& name, const Type& t) {
    auto v = lookup(name, t);
    if (!v) not_reproduced("incomplete model");
    if (t.is_array()) materialize(*v, t.elem == Type::Kind::Bool, heap_name(t.elem == Type::Kind::Bool));
    return {*v, t};
  }

  // Model value of `key`, or the type default; arrays are created from `heap`.
  std::int64_t load(const std::string& key, const Type& t, const std::string& heap) {
    std::int64_t v = lookup(key, t).value_or(0);
    if (t.is_array()) materialize(v, t.elem == Type::Kind::Bool, heap);
    return v;
  }

  std::vector<std::int64_t>& materialize(std::int64_t ref, bool bools, const std::string& heap) {
    auto key = std::make_pair(ref, bools);
    auto it = arrays_.find(key);
    if (it != arrays_.end()) return it->second;
    std::int64_t len = ref == 0 ? 0 : m_.length_of(ref);
    if (len < 0 || len > kMaxArrayLength) not_reproduced("array length in the model is out of range");
    std::vector<std::int64_t> elems(static_cast<std::size_t>(len));
    for (std::int64_t i = 0; i < len; ++i) {
      std::int64_t x = m_.heap_value(heap, ref, i);
      elems[static_cast<std::size_t>(i)] = bools ? (x != 0) : x;
    }
    return arrays_.emplace(key, std::move(elems)).first->second;
  }

  std::vector<std::int64_t>& array(std::int64_t ref, bool bools) {
    return materialize(ref, bools, heap_name(bools));
  }

  // Overwrites the elements of `ref` with the havoc table `heap`, if the
  // model has one.
  void rehavoc(std::int64_t ref, bool bools, const std::string& heap) {
    if (ref == 0) return;
    auto h = m_.heaps.find(heap);
    if (h == m_.heaps.end()) return;
    auto& elems = array(ref, bools);
    for (std::size_t i = 0; i < elems.size(); ++i) {
      std::int64_t x = m_.heap_value(heap, ref, static_cast<std::int64_t>(i));
      elems[i] = bools ? (x != 0) : x;
    }
  }

  // ---- checks --------------------------------------------------------------

  void step() {
    if (++steps_ > opts_.step_cap)
      throw Stop{{Outcome::Kind::StepLimit, K::AssertStmt, {}, "step cap reached"}};
  }

  // An obligation of the replayed declaration. Only the target confirms;
  // any other failure means the model took a different path than the VC.
  void check(bool ok, K kind, const Span& span) {
    if (ok) return;
    if (quiet_ > 0) not_reproduced("a called contract or function body is ill-formed under the model");
    if (kind == target_.kind && span == target_.span)
      throw Stop{{Outcome::Kind::Confirmed, kind, span, {}}};
    not_reproduced("earlier failure of " + std::string(ir::kind_name(kind)) + " at " + where(span));
  }

  std::int64_t arith(BinaryOp op, std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    bool overflow = false;
    switch (op) {
      case BinaryOp::Add: overflow = __builtin_add_overflow(a, b, &r); break;
      case BinaryOp::Sub: overflow = __builtin_sub_overflow(a, b, &r); break;
      case BinaryOp::Mul: overflow = __builtin_mul_overflow(a, b, &r); break;
      case BinaryOp::Div:
        if (a == INT64_MIN && b == -1) overflow = true;
        else r = prover::euclid_div(a, b);
        break;
      case BinaryOp::Mod:
        if (a == INT64_MIN && b == -1) r = 0;
        else r = prover::euclid_mod(a, b);
        break;
      default: break;
    }
    if (overflow) not_reproduced("arithmetic overflow");
    return r;
  }

  static bool compare(BinaryOp op, std::int64_t a, std::int64_t b) {
    switch (op) {
      case BinaryOp::Lt: return a < b;
      case BinaryOp::Le: return a <= b;
      case BinaryOp::Gt: return a > b;
      case BinaryOp::Ge: return a >= b;
      case BinaryOp::Eq: return a == b;
      case BinaryOp::Ne: return a != b;
      default: return false;
    }
  }

  // ---- expressions ---------------------------------------------------------

  bool truth(const Expr& e, Env& env) { return eval(e, env) != 0; }

  std::int64_t quiet_eval(const Expr& e, Env& env) {
    ++quiet_;
    std::int64_t v = eval(e, env);
    --quiet_;
    return v;
  }

  std::int64_t eval(const Expr& e, Env& env) {
    return std::visit(
        [&](const auto& n) -> std::int64_t {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, IntLit>) {
            return n.value;
          } else if constexpr (std::is_same_v<T, BoolLit>) {
            return n.value ? 1 : 0;
          } else if constexpr (std::is_same_v<T, NullLit>) {
            return 0;
          } else if constexpr (std::is_same_v<T, VarRef>) {
            auto it = env.find(n.name);
            if (it == env.end()) not_reproduced("variable '" + n.name + "' has no value");
            return it->second.v;
          } else if constexpr (std::is_same_v<T, Binary>) {
            return eval_binary(e, n, env);
          } else if constexpr (std::is_same_v<T, Unary>) {
            std::int64_t v = eval(*n.operand, env);
            if (n.op == UnaryOp::Not) return v ? 0 : 1;
            return arith(BinaryOp::Sub, 0, v);
          } else if constexpr (std::is_same_v<T, ChainedCmp>) {
            std::vector<std::int64_t> vals;
            for (const auto& o : n.operands) vals.push_back(eval(*o, env));
            bool ok = true;
            for (std::size_t i = 0; i < n.ops.size(); ++i) ok = ok && compare(n.ops[i], vals[i], vals[i + 1]);
            return ok ? 1 : 0;
          } else if constexpr (std::is_same_v<T, ArraySelect>) {
            std::int64_t a = eval(*n.array, env);
            std::int64_t i = eval(*n.index, env);
            check(a != 0, K::NullDeref, e.span);
            auto& elems = array(a, n.array->type.elem == Type::Kind::Bool);
            check(i >= 0 && i < static_cast<std::int64_t>(elems.size()), K::IndexInBounds, e.span);
            return elems[static_cast<std::size_t>(i)];
          } else if constexpr (std::is_same_v<T, Length>) {
            std::int64_t a = eval(*n.array, env);
            check(a != 0, K::NullDeref, e.span);
            return static_cast<std::int64_t>(array(a, n.array->type.elem == Type::Kind::Bool).size());
          } else if constexpr (std::is_same_v<T, IfThenElse>) {
            return truth(*n.cond, env) ? eval(*n.then_expr, env) : eval(*n.else_expr, env);
          } else if constexpr (std::is_same_v<T, Call>) {
            return eval_call(e, n, env);
          } else if constexpr (std::is_same_v<T, Quantifier>) {
            return eval_quantifier(n, env);
          }
        },
        e.node);
  }

  std::int64_t eval_binary(const Expr& e, const Binary& n, Env& env) {
    std::int64_t l = eval(*n.lhs, env);
    switch (n.op) {
      case BinaryOp::And: return l ? truth(*n.rhs, env) : 0;
      case BinaryOp::Or: return l ? 1 : truth(*n.rhs, env);
      case BinaryOp::Implies: return l ? truth(*n.rhs, env) : 1;
      case BinaryOp::Iff: return (l != 0) == truth(*n.rhs, env);
      default: break;
    }
    std::int64_t r = eval(*n.rhs, env);
    switch (n.op) {
      case BinaryOp::Div:
      case BinaryOp::Mod:
        check(r != 0, K::DivByZero, e.span);
        return arith(n.op, l, r);
      case BinaryOp::Add:
      case BinaryOp::Sub:
      case BinaryOp::Mul:
        return arith(n.op, l, r);
      default:
        return compare(n.op, l, r) ? 1 : 0;
    }
  }

  std::int64_t eval_call(const Expr& e, const Call& n, Env& env) {
    const FunctionDecl* f = tp_.function(n.resolved);
    if (!f) not_reproduced("unknown function '" + n.callee + "'");
    Env callee;
    for (std::size_t i = 0; i < n.args.size() && i < f->ins.size(); ++i) {
      std::int64_t v = eval(*n.args[i], env);
      if (f->ins[i].type.kind == Type::Kind::Nat && n.args[i]->type.kind != Type::Kind::Nat)
        check(v >= 0, K::NatNonNegative, n.args[i]->span);
      callee[f->ins[i].name] = {v, f->ins[i].type};
    }
    for (const auto& r : f->requires_) check(quiet_eval(*r, callee) != 0, K::PreconditionAtCall, e.span);
    if (quiet_ == 0 && termination_checks_ && caller_measure_ && f->decreases &&
        cg_.recursive(decl_, n.resolved)) {
      std::int64_t d = quiet_eval(*f->decreases, callee);
      check(d < *caller_measure_, K::TerminationDecreases, e.span);
      check(*caller_measure_ >= 0, K::TerminationBounded, e.span);
    }
    step();
    if (++depth_ > opts_.call_depth_cap)
      throw Stop{{Outcome::Kind::StepLimit, K::AssertStmt, {}, "call depth cap reached"}};
    std::int64_t v = quiet_eval(*f->body, callee);
    --depth_;
    return v;
  }

  // Enumeration domain of a bound integer: indices of the arrays the body
  // mentions, literals and current integer values with their neighbours.
  std::vector<std::int64_t> domain(const Quantifier& q, Env& env) {
    std::set<std::int64_t> vals{0};
    auto near = [&](std::int64_t v) {
      vals.insert(v);
      if (v > INT64_MIN) vals.insert(v - 1);
      if (v < INT64_MAX) vals.insert(v + 1);
    };
    for_each_subexpr(*q.body, [&](const Expr& s) {
      const Expr* arr = nullptr;
      if (const auto* sel = s.as<ArraySelect>()) arr = sel->array.get();
      if (const auto* len = s.as<Length>()) arr = len->array.get();
      if (arr)
        if (const auto* v = arr->as<VarRef>(); v && v->name != q.var)
          if (auto it = env.find(v->name); it != env.end() && it->second.v != 0) {
            auto n = static_cast<std::int64_t>(array(it->second.v, arr->type.elem == Type::Kind::Bool).size());
            for (std::int64_t i = 0; i < n; ++i) vals.insert(i);
            near(n);
          }
      if (const auto* lit = s.as<IntLit>()) near(lit->value);
    });
    std::int64_t lo = 0, hi = 0;
    for (const auto& [name, slot] : env) {
      if (!slot.type.is_numeric()) continue;
      near(slot.v);
      lo = std::min(lo, slot.v);
      hi = std::max(hi, slot.v);
    }
    if (hi - lo <= kMaxDenseRange)
      for (std::int64_t v = lo; v <= hi; ++v) vals.insert(v);
    return {vals.begin(), vals.end()};
  }

  // Every instance is evaluated, so well-formedness failures anywhere in the
  // domain surface before the quantifier's value is used.
  std::int64_t eval_quantifier(const Quantifier& q, Env& env) {
    std::optional<Slot> shadowed;
    if (auto it = env.find(q.var); it != env.end()) shadowed = it->second;
    bool result = q.universal;
    for (std::int64_t v : domain(q, env)) {
      step();
      env[q.var] = {v, Type::integer()};
      bool b = truth(*q.body, env);
      result = q.universal ? (result && b) : (result || b);
    }
    if (shadowed) env[q.var] = *shadowed;
    else env.erase(q.var);
    return result ? 1 : 0;
  }

  // ---- statements ----------------------------------------------------------

  Flow exec_block(const Block& b, Env& env) {
    for (const auto& s : b.stmts)
      if (exec(*s, env) == Flow::Break) return Flow::Break;
    return Flow::Normal;
  }

  Flow exec(const Stmt& s, Env& env) {
    step();
    return std::visit(
        [&](const auto& n) -> Flow {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, VarDecl>) {
            if (n.init) {
              std::int64_t v = eval(*n.init, env);
              if (n.type.kind == Type::Kind::Nat && n.init->type.kind != Type::Kind::Nat)
                check(v >= 0, K::NatNonNegative, s.span);
              env[n.name] = {v, n.type};
            } else {
              env[n.name] = {load(n.name + "@" + std::to_string(s.id), n.type,
                                  heap_name(n.type.elem == Type::Kind::Bool)),
                             n.type};
            }
          } else if constexpr (std::is_same_v<T, Assign>) {
            Type t = type_of(n.target, env);
            if (n.index) {
              std::int64_t i = eval(*n.index, env);
              std::int64_t v = eval(*n.rhs, env);
              std::int64_t a = env.count(n.target) ? env[n.target].v : 0;
              check(a != 0, K::NullDeref, n.target_span);
              bool bools = t.elem == Type::Kind::Bool;
              auto& elems = array(a, bools);
              check(i >= 0 && i < static_cast<std::int64_t>(elems.size()), K::IndexInBounds, s.span);
              elems[static_cast<std::size_t>(i)] = bools ? (v != 0) : v;
            } else {
              std::int64_t v = eval(*n.rhs, env);
              if (t.kind == Type::Kind::Nat && n.rhs->type.kind != Type::Kind::Nat)
                check(v >= 0, K::NatNonNegative, s.span);
              env[n.target] = {v, t};
            }
          } else if constexpr (std::is_same_v<T, MultiAssignCall>) {
            exec_call(s, n, env);
          } else if constexpr (std::is_same_v<T, If>) {
            if (truth(*n.cond, env)) return exec_block(n.then_block, env);
            if (n.else_block) return exec_block(*n.else_block, env);
          } else if constexpr (std::is_same_v<T, While>) {
            exec_loop(s, n, env);
          } else if constexpr (std::is_same_v<T, Assert>) {
            check(truth(*n.cond, env), K::AssertStmt, s.span);
          } else if constexpr (std::is_same_v<T, Break>) {
            return Flow::Break;
          }
          return Flow::Normal;
        },
        s.node);
  }

  void exec_call(const Stmt& s, const MultiAssignCall& n, Env& env) {
    const MethodDecl* callee = tp_.method(n.resolved);
    if (!callee) not_reproduced("unknown method '" + n.callee + "'");
    const std::string site = "@" + std::to_string(s.id);
    Env cenv;
    for (std::size_t i = 0; i < n.args.size() && i < callee->ins.size(); ++i) {
      const Param& p = callee->ins[i];
      std::int64_t v = eval(*n.args[i], env);
      if (p.type.kind == Type::Kind::Nat && n.args[i]->type.kind != Type::Kind::Nat)
        check(v >= 0, K::NatNonNegative, n.args[i]->span);
      cenv[p.name] = {v, p.type};
    }
    for (const auto& r : callee->requires_)
      check(quiet_eval(*r, cenv) != 0, K::PreconditionAtCall, s.span);
    if (caller_measure_ && callee->decreases && cg_.recursive(decl_, n.resolved)) {
      std::int64_t d = quiet_eval(*callee->decreases, cenv);
      check(d < *caller_measure_, K::TerminationDecreases, s.span);
      check(*caller_measure_ >= 0, K::TerminationBounded, s.span);
    }

    // The body is not run: outputs and modified arrays come from the model.
    for (const auto& o : callee->outs) {
      bool bools = o.type.elem == Type::Kind::Bool;
      std::string heap = m_.heaps.count(heap_name(bools, site)) ? heap_name(bools, site) : heap_name(bools);
      cenv[o.name] = {load(o.name + site, o.type, heap), o.type};
    }
    for (const auto& id : callee->modifies)
      for (const auto& p : callee->ins)
        if (p.name == id.name && p.type.is_array()) {
          bool bools = p.type.elem == Type::Kind::Bool;
          rehavoc(cenv[p.name].v, bools, heap_name(bools, site));
        }
    for (const auto& en : callee->ensures)
      if (quiet_eval(*en, cenv) == 0)
        not_reproduced("postcondition of '" + n.callee + "' does not hold for the model's outputs");

    for (std::size_t i = 0; i < n.lhs.size() && i < callee->outs.size(); ++i) {
      const std::string& x = n.lhs[i];
      Type t = n.declares && i < n.lhs_types.size() ? n.lhs_types[i] : type_of(x, env);
      std::int64_t v = cenv[callee->outs[i].name].v;
      if (t.kind == Type::Kind::Nat && callee->outs[i].type.kind != Type::Kind::Nat)
        check(v >= 0, K::NatNonNegative, s.span);
      env[x] = {v, t};
    }
  }

  static std::set<std::string> loop_targets(const Block& body) {
    std::set<std::string> names;
    for_each_stmt(body, [&](const Stmt& s) {
      if (const auto* v = s.as<VarDecl>()) names.insert(v->name);
      if (const auto* a = s.as<Assign>(); a && !a->index) names.insert(a->target);
      if (const auto* c = s.as<MultiAssignCall>())
        for (const auto& l : c->lhs) names.insert(l);
    });
    return names;
  }

  // Body, invariant maintenance and measure checks of one iteration.
  Flow iterate(const While& w, const Expr* measure, Env& env) {
    std::optional<std::int64_t> snap;
    if (measure) snap = eval(*measure, env);
    if (exec_block(w.body, env) == Flow::Break) return Flow::Break;
    for (const auto& inv : w.invariants) check(truth(*inv, env), K::LoopInvMaintained, inv->span);
    if (measure) {
      std::int64_t d = eval(*measure, env);
      check(d < *snap, K::TerminationDecreases, measure->span);
      check(*snap >= 0, K::TerminationBounded, measure->span);
    }
    return Flow::Normal;
  }

  void exec_loop(const Stmt& s, const While& w, Env& env) {
    for (const auto& inv : w.invariants) check(truth(*inv, env), K::LoopInvEntry, inv->span);

    std::optional<ExprPtr> guessed;
    const Expr* measure = w.decreases.get();
    if (!measure) {
      guessed = ir::guess_decreases(w);
      if (guessed) measure = guessed->get();
    }

    const std::string site = "@" + std::to_string(s.id);
    std::set<std::string> targets = loop_targets(w.body);
    bool modular = m_.heaps.count(heap_name(false, site)) || m_.heaps.count(heap_name(true, site));
    for (const auto& t : targets)
      modular = modular || m_.ints.count(t + site) || m_.bools.count(t + site);

    if (!modular) {
      for (;;) {
        if (!truth(*w.guard, env)) return;
        if (iterate(w, measure, env) == Flow::Break) return;
      }
    }

    // Enter an arbitrary iteration: the state the VC quantified over.
    for (const auto& t : targets) {
      Type ty = type_of(t, env);
      bool bools = ty.elem == Type::Kind::Bool;
      std::string heap = m_.heaps.count(heap_name(bools, site)) ? heap_name(bools, site) : heap_name(bools);
      if (lookup(t + site, ty)) env[t] = {load(t + site, ty, heap), ty};
    }
    if (method_)
      for (const auto& id : method_->modifies)
        if (auto it = env.find(id.name); it != env.end() && it->second.type.is_array()) {
          bool bools = it->second.type.elem == Type::Kind::Bool;
          rehavoc(it->second.v, bools, heap_name(bools, site));
        }
    for (const auto& inv : w.invariants)
      if (!truth(*inv, env)) not_reproduced("loop invariant does not hold in the model's loop state");
    if (!truth(*w.guard, env)) return;
    if (iterate(w, measure, env) == Flow::Break) return;
    not_reproduced("obligation holds on the replayed iteration");
  }

  const typecheck::TypedProgram& tp_;
  ir::CallGraph cg_;
  const Model& m_;
  Target target_;
  ReplayOptions opts_;
  std::string decl_;
  const MethodDecl* method_ = nullptr;
  std::map<std::string, Type> var_types_;
  std::map<std::pair<std::int64_t, bool>, std::vector<std::int64_t>> arrays_;
  std::optional<std::int64_t> caller_measure_;
  bool termination_checks_ = true;
  int quiet_ = 0;  // > 0 while evaluating callee contracts and bodies
  int depth_ = 0;
  long steps_ = 0;
};

}  // namespace

Outcome replay(const typecheck::TypedProgram& tp, const std::string& decl, const Model& model,
               const Target& target, const ReplayOptions& opts) {
  Interpreter in(tp, model, target, opts, decl);
  if (const MethodDecl* m = tp.method(decl)) return in.run(*m);
  if (const FunctionDecl* f = tp.function(decl)) return in.run(*f);
  return {Outcome::Kind::NotReproduced, target.kind, {}, "unknown declaration '" + decl + "'"};
}

Model with_input_defaults(const typecheck::TypedProgram& tp, const std::string& decl,
                          const Model& model) {
  Model out = model;
  const std::vector<Param>* ins = nullptr;
  if (const MethodDecl* m = tp.method(decl)) ins = &m->ins;
  else if (const FunctionDecl* f = tp.function(decl)) ins = &f->ins;
  if (!ins) return out;
  for (const auto& p : *ins) {
    if (p.type.is_bool()) out.bools.try_emplace(p.name, false);
    else out.ints.try_emplace(p.name, 0);
  }
  return out;
}

std::string_view kind_name(Outcome::Kind k) {
  switch (k) {
    case Outcome::Kind::Confirmed: return "confirmed";
    case Outcome::Kind::NotReproduced: return "not-reproduced";
    case Outcome::Kind::StepLimit: return "step-limit";
  }
  return "?";
}

std::string to_string(const Outcome& o) {
  switch (o.kind) {
    case Outcome::Kind::Confirmed:
      return "confirmed " + std::string(ir::kind_name(o.obligation)) + " at " + where(o.span);
    case Outcome::Kind::NotReproduced:
      return "not reproduced: " + o.detail;
    case Outcome::Kind::StepLimit:
      return "step limit";
  }
  return "?";
}

}  // namespace minidafny::replay
