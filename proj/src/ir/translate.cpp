#include "minidafny/ir/translate.hpp"

#include <stdexcept>

namespace minidafny::ir {

using namespace frontend;

Sort sort_of(const Type& t) {
  switch (t.kind) {
    case Type::Kind::Bool: return Sort::Bool;
    case Type::Kind::Array:
    case Type::Kind::Null: return Sort::Ref;
    default: return Sort::Int;
  }
}

Translator::Translator(TermManager& tm, const typecheck::TypedProgram& tp) : tm_(tm), tp_(tp) {}

TermRef Translator::heap(Type::Kind elem) {
  return elem == Type::Kind::Bool ? tm_.mk_const(kHeapBool, Sort::HeapBool)
                                  : tm_.mk_const(kHeapInt, Sort::HeapInt);
}

TermRef Translator::var(const std::string& name, const Type& type) {
  return tm_.mk_const(name, sort_of(type));
}

std::vector<Type::Kind> Translator::heaps_read(const std::string& qualified) const {
  const FunctionDecl* f = tp_.function(qualified);
  bool ints = false, bools = false;
  if (f) {
    for (const auto& r : f->reads)
      for (const auto& p : f->ins)
        if (p.name == r.name && p.type.is_array())
          (p.type.elem == Type::Kind::Bool ? bools : ints) = true;
  }
  std::vector<Type::Kind> out;
  if (ints) out.push_back(Type::Kind::Int);
  if (bools) out.push_back(Type::Kind::Bool);
  return out;
}

TermRef Translator::term(const Expr& e) {
  return std::visit(
      [&](const auto& n) -> TermRef {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          return tm_.mk_int(n.value);
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          return tm_.mk_bool(n.value);
        } else if constexpr (std::is_same_v<T, NullLit>) {
          return tm_.mk_null();
        } else if constexpr (std::is_same_v<T, VarRef>) {
          if (auto it = bound_.find(n.name); it != bound_.end()) return it->second.back();
          return var(n.name, e.type);
        } else if constexpr (std::is_same_v<T, Binary>) {
          TermRef a = term(*n.lhs);
          TermRef b = term(*n.rhs);
          switch (n.op) {
            case BinaryOp::Add: return tm_.mk_add(a, b);
            case BinaryOp::Sub: return tm_.mk_sub(a, b);
            case BinaryOp::Mul: return tm_.mk_mul(a, b);
            case BinaryOp::Div: return tm_.mk_div(a, b);
            case BinaryOp::Mod: return tm_.mk_mod(a, b);
            case BinaryOp::Lt: return tm_.mk_lt(a, b);
            case BinaryOp::Le: return tm_.mk_le(a, b);
            case BinaryOp::Gt: return tm_.mk_gt(a, b);
            case BinaryOp::Ge: return tm_.mk_ge(a, b);
            case BinaryOp::Eq: return tm_.mk_eq(a, b);
            case BinaryOp::Ne: return tm_.mk_ne(a, b);
            case BinaryOp::And: return tm_.mk_and(a, b);
            case BinaryOp::Or: return tm_.mk_or(a, b);
            case BinaryOp::Implies: return tm_.mk_implies(a, b);
            case BinaryOp::Iff: return tm_.mk_iff(a, b);
          }
          throw std::logic_error("unknown binary operator");
        } else if constexpr (std::is_same_v<T, Unary>) {
          TermRef a = term(*n.operand);
          return n.op == UnaryOp::Not ? tm_.mk_not(a) : tm_.mk_neg(a);
        } else if constexpr (std::is_same_v<T, ChainedCmp>) {
          std::vector<TermRef> operands, conj;
          for (const auto& o : n.operands) operands.push_back(term(*o));
          for (std::size_t i = 0; i < n.ops.size(); ++i) {
            TermRef a = operands[i], b = operands[i + 1];
            switch (n.ops[i]) {
              case BinaryOp::Lt: conj.push_back(tm_.mk_lt(a, b)); break;
              case BinaryOp::Le: conj.push_back(tm_.mk_le(a, b)); break;
              case BinaryOp::Gt: conj.push_back(tm_.mk_gt(a, b)); break;
              default: conj.push_back(tm_.mk_ge(a, b)); break;
            }
          }
          return tm_.mk_and(std::move(conj));
        } else if constexpr (std::is_same_v<T, ArraySelect>) {
          return tm_.mk_select(heap(n.array->type.elem), term(*n.array), term(*n.index));
        } else if constexpr (std::is_same_v<T, Length>) {
          return tm_.mk_length(term(*n.array));
        } else if constexpr (std::is_same_v<T, IfThenElse>) {
          return tm_.mk_ite(term(*n.cond), term(*n.then_expr), term(*n.else_expr));
        } else if constexpr (std::is_same_v<T, Call>) {
          const FunctionDecl* f = tp_.function(n.resolved);
          if (!f) throw std::logic_error("unresolved function call '" + n.callee + "'");
          std::vector<TermRef> args;
          for (const auto& a : n.args) args.push_back(term(*a));
          for (Type::Kind k : heaps_read(n.resolved)) args.push_back(heap(k));
          return tm_.mk_apply(n.resolved, sort_of(f->return_type), std::move(args));
        } else {
          static_assert(std::is_same_v<T, Quantifier>);
          TermRef v = tm_.mk_const(tm_.fresh_name(n.var), Sort::Int);
          bind(n.var, v);
          TermRef body = term(*n.body);
          unbind(n.var);
          return n.universal ? tm_.mk_forall(v, body) : tm_.mk_exists(v, body);
        }
      },
      e.node);
}

const FunctionDef& Translator::function(const std::string& qualified) {
  if (auto it = defs_.find(qualified); it != defs_.end()) return it->second;
  const FunctionDecl* f = tp_.function(qualified);
  if (!f) throw std::logic_error("unknown function '" + qualified + "'");
  FunctionDef d;
  d.name = qualified;
  d.result = sort_of(f->return_type);
  d.nat_result = f->return_type.kind == Type::Kind::Nat;
  for (const auto& p : f->ins) d.params.push_back(var(p.name, p.type));
  d.user_arity = d.params.size();
  for (Type::Kind k : heaps_read(qualified)) d.params.push_back(heap(k));
  // Nat parameters restrict the domain on which the body defines the result.
  for (std::size_t i = 0; i < f->ins.size(); ++i)
    if (f->ins[i].type.kind == Type::Kind::Nat) d.requires_.push_back(tm_.mk_ge(d.params[i], tm_.mk_int(0)));
  for (const auto& r : f->requires_) d.requires_.push_back(term(*r));
  d.body = term(*f->body);
  for (const auto& en : f->ensures) d.ensures.push_back(term(*en));
  return defs_.emplace(qualified, std::move(d)).first->second;
}

const std::map<std::string, FunctionDef>& Translator::functions() {
  if (!all_defined_) {
    for (const auto& [q, f] : tp_.functions()) function(q);
    all_defined_ = true;
  }
  return defs_;
}

}  // namespace minidafny::ir
