#include "minidafny/logic/term.hpp"

#include <functional>
#include <sstream>
#include <stdexcept>

namespace minidafny::logic {

std::string_view to_string(Sort s) {
  switch (s) {
    case Sort::Bool: return "bool";
    case Sort::Int: return "int";
    case Sort::Ref: return "ref";
    case Sort::HeapInt: return "heap<int>";
    case Sort::HeapBool: return "heap<bool>";
  }
  return "?";
}

namespace {

std::size_t combine(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

bool is_bool_sorted(TermRef t) { return t->sort == Sort::Bool; }

}  // namespace

bool TermManager::Eq::operator()(const Term* a, const Term* b) const {
  return a->op == b->op && a->sort == b->sort && a->value == b->value && a->name == b->name &&
         a->args == b->args;
}

TermManager::TermManager() {
  true_ = intern(Term{Op::BoolLit, Sort::Bool, 1, {}, {}});
  false_ = intern(Term{Op::BoolLit, Sort::Bool, 0, {}, {}});
}

TermRef TermManager::intern(Term t) {
  std::size_t h = combine(static_cast<std::size_t>(t.op), static_cast<std::size_t>(t.sort));
  h = combine(h, std::hash<std::int64_t>{}(t.value));
  h = combine(h, std::hash<std::string>{}(t.name));
  for (TermRef a : t.args) h = combine(h, a->id);
  t.hash = h;
  auto it = table_.find(&t);
  if (it != table_.end()) return *it;
  t.id = static_cast<std::uint32_t>(terms_.size());
  terms_.push_back(std::move(t));
  const Term* p = &terms_.back();
  table_.insert(p);
  return p;
}

TermRef TermManager::mk_bool(bool b) { return b ? true_ : false_; }

TermRef TermManager::mk_int(std::int64_t v) { return intern(Term{Op::IntLit, Sort::Int, v, {}, {}}); }

TermRef TermManager::mk_null() { return intern(Term{Op::Null, Sort::Ref, 0, {}, {}}); }

TermRef TermManager::mk_const(const std::string& name, Sort sort) {
  return intern(Term{Op::Const, sort, 0, name, {}});
}

TermRef TermManager::mk_not(TermRef a) {
  if (a->op == Op::BoolLit) return mk_bool(!a->value);
  if (a->op == Op::Not) return a->args[0];
  return intern(Term{Op::Not, Sort::Bool, 0, {}, {a}});
}

TermRef TermManager::mk_and(std::vector<TermRef> args) {
  std::vector<TermRef> flat;
  std::unordered_set<TermRef> seen;
  std::function<bool(TermRef)> add = [&](TermRef a) {
    if (a->is_true()) return true;
    if (a->is_false()) return false;
    if (a->op == Op::And) {
      for (TermRef b : a->args)
        if (!add(b)) return false;
      return true;
    }
    if (seen.insert(a).second) flat.push_back(a);
    return true;
  };
  for (TermRef a : args)
    if (!add(a)) return false_;
  if (flat.empty()) return true_;
  if (flat.size() == 1) return flat[0];
  return intern(Term{Op::And, Sort::Bool, 0, {}, std::move(flat)});
}

TermRef TermManager::mk_or(std::vector<TermRef> args) {
  std::vector<TermRef> flat;
  std::unordered_set<TermRef> seen;
  std::function<bool(TermRef)> add = [&](TermRef a) {
    if (a->is_false()) return true;
    if (a->is_true()) return false;
    if (a->op == Op::Or) {
      for (TermRef b : a->args)
        if (!add(b)) return false;
      return true;
    }
    if (seen.insert(a).second) flat.push_back(a);
    return true;
  };
  for (TermRef a : args)
    if (!add(a)) return true_;
  if (flat.empty()) return false_;
  if (flat.size() == 1) return flat[0];
  return intern(Term{Op::Or, Sort::Bool, 0, {}, std::move(flat)});
}

TermRef TermManager::mk_implies(TermRef a, TermRef b) {
  if (a->is_true()) return b;
  if (a->is_false() || b->is_true()) return true_;
  if (b->is_false()) return mk_not(a);
  if (a == b) return true_;
  return intern(Term{Op::Implies, Sort::Bool, 0, {}, {a, b}});
}

TermRef TermManager::mk_iff(TermRef a, TermRef b) {
  if (a == b) return true_;
  if (a->is_true()) return b;
  if (b->is_true()) return a;
  if (a->is_false()) return mk_not(b);
  if (b->is_false()) return mk_not(a);
  return intern(Term{Op::Iff, Sort::Bool, 0, {}, {a, b}});
}

TermRef TermManager::mk_ite(TermRef c, TermRef t, TermRef e) {
  if (c->is_true()) return t;
  if (c->is_false()) return e;
  if (t == e) return t;
  if (t->sort != e->sort) throw std::logic_error("ite branches of different sorts");
  return intern(Term{Op::Ite, t->sort, 0, {}, {c, t, e}});
}

TermRef TermManager::mk_eq(TermRef a, TermRef b) {
  if (a == b) return true_;
  if (is_bool_sorted(a)) return mk_iff(a, b);
  if (a->sort != b->sort) throw std::logic_error("equality between different sorts");
  return intern(Term{Op::Eq, Sort::Bool, 0, {}, {a, b}});
}

TermRef TermManager::mk_lt(TermRef a, TermRef b) { return intern(Term{Op::Lt, Sort::Bool, 0, {}, {a, b}}); }
TermRef TermManager::mk_le(TermRef a, TermRef b) { return intern(Term{Op::Le, Sort::Bool, 0, {}, {a, b}}); }
TermRef TermManager::mk_add(TermRef a, TermRef b) { return intern(Term{Op::Add, Sort::Int, 0, {}, {a, b}}); }
TermRef TermManager::mk_sub(TermRef a, TermRef b) { return intern(Term{Op::Sub, Sort::Int, 0, {}, {a, b}}); }
TermRef TermManager::mk_mul(TermRef a, TermRef b) { return intern(Term{Op::Mul, Sort::Int, 0, {}, {a, b}}); }
TermRef TermManager::mk_neg(TermRef a) { return intern(Term{Op::Neg, Sort::Int, 0, {}, {a}}); }
TermRef TermManager::mk_div(TermRef a, TermRef b) { return intern(Term{Op::Div, Sort::Int, 0, {}, {a, b}}); }
TermRef TermManager::mk_mod(TermRef a, TermRef b) { return intern(Term{Op::Mod, Sort::Int, 0, {}, {a, b}}); }

TermRef TermManager::mk_select(TermRef heap, TermRef ref, TermRef index) {
  Sort s = heap->sort == Sort::HeapBool ? Sort::Bool : Sort::Int;
  return intern(Term{Op::Select, s, 0, {}, {heap, ref, index}});
}

TermRef TermManager::mk_store(TermRef heap, TermRef ref, TermRef index, TermRef value) {
  return intern(Term{Op::Store, heap->sort, 0, {}, {heap, ref, index, value}});
}

TermRef TermManager::mk_length(TermRef ref) { return intern(Term{Op::Length, Sort::Int, 0, {}, {ref}}); }

TermRef TermManager::mk_apply(const std::string& fn, Sort result, std::vector<TermRef> args) {
  return intern(Term{Op::Apply, result, 0, fn, std::move(args)});
}

TermRef TermManager::mk_forall(TermRef var, TermRef body) {
  if (body->op == Op::BoolLit) return body;
  return intern(Term{Op::Forall, Sort::Bool, 0, {}, {var, body}});
}

TermRef TermManager::mk_exists(TermRef var, TermRef body) {
  if (body->op == Op::BoolLit) return body;
  return intern(Term{Op::Exists, Sort::Bool, 0, {}, {var, body}});
}

TermRef TermManager::rebuild(TermRef t, std::vector<TermRef> a) {
  if (a == t->args) return t;
  switch (t->op) {
    case Op::BoolLit:
    case Op::IntLit:
    case Op::Null:
    case Op::Const: return t;
    case Op::Not: return mk_not(a[0]);
    case Op::And: return mk_and(std::move(a));
    case Op::Or: return mk_or(std::move(a));
    case Op::Implies: return mk_implies(a[0], a[1]);
    case Op::Iff: return mk_iff(a[0], a[1]);
    case Op::Ite: return mk_ite(a[0], a[1], a[2]);
    case Op::Eq: return mk_eq(a[0], a[1]);
    case Op::Lt: return mk_lt(a[0], a[1]);
    case Op::Le: return mk_le(a[0], a[1]);
    case Op::Add: return mk_add(a[0], a[1]);
    case Op::Sub: return mk_sub(a[0], a[1]);
    case Op::Mul: return mk_mul(a[0], a[1]);
    case Op::Neg: return mk_neg(a[0]);
    case Op::Div: return mk_div(a[0], a[1]);
    case Op::Mod: return mk_mod(a[0], a[1]);
    case Op::Select: return mk_select(a[0], a[1], a[2]);
    case Op::Store: return mk_store(a[0], a[1], a[2], a[3]);
    case Op::Length: return mk_length(a[0]);
    case Op::Apply: return mk_apply(t->name, t->sort, std::move(a));
    case Op::Forall: return mk_forall(a[0], a[1]);
    case Op::Exists: return mk_exists(a[0], a[1]);
  }
  throw std::logic_error("rebuild: unknown op");
}

TermRef TermManager::substitute(TermRef t, const Substitution& sub) {
  if (sub.empty()) return t;
  std::unordered_map<TermRef, TermRef> memo;
  std::function<TermRef(TermRef)> go = [&](TermRef u) -> TermRef {
    if (auto it = sub.find(u); it != sub.end()) return it->second;
    if (u->args.empty()) return u;
    if (auto it = memo.find(u); it != memo.end()) return it->second;
    std::vector<TermRef> a;
    a.reserve(u->args.size());
    for (TermRef c : u->args) a.push_back(go(c));
    TermRef r = rebuild(u, std::move(a));
    memo.emplace(u, r);
    return r;
  };
  return go(t);
}

std::string TermManager::fresh_name(const std::string& base) {
  auto bang = base.find('!');
  std::string stem = bang == std::string::npos ? base : base.substr(0, bang);
  return stem + "!" + std::to_string(++fresh_counter_);
}

TermRef TermManager::refresh_bound(TermRef t) {
  if (!has_quantifier(t)) return t;
  std::function<TermRef(TermRef, const Substitution&)> go = [&](TermRef u,
                                                                const Substitution& sub) -> TermRef {
    if (u->is_quantifier()) {
      TermRef v = u->bound();
      TermRef nv = mk_const(fresh_name(v->name), v->sort);
      Substitution inner = sub;
      inner[v] = nv;
      TermRef body = go(u->body(), inner);
      return u->op == Op::Forall ? mk_forall(nv, body) : mk_exists(nv, body);
    }
    if (auto it = sub.find(u); it != sub.end()) return it->second;
    if (u->args.empty()) return u;
    std::vector<TermRef> a;
    for (TermRef c : u->args) a.push_back(go(c, sub));
    return rebuild(u, std::move(a));
  };
  return go(t, {});
}

TermSet free_consts(TermRef t) {
  TermSet out;
  std::unordered_set<TermRef> bound;
  std::function<void(TermRef)> go = [&](TermRef u) {
    if (u->op == Op::Const) {
      if (!bound.count(u)) out.insert(u);
      return;
    }
    if (u->is_quantifier()) {
      bool fresh = bound.insert(u->bound()).second;
      go(u->body());
      if (fresh) bound.erase(u->bound());
      return;
    }
    for (TermRef c : u->args) go(c);
  };
  go(t);
  return out;
}

bool has_quantifier(TermRef t) {
  return !collect(t, [](TermRef u) { return u->is_quantifier(); }).empty();
}

namespace {

int precedence(TermRef t) {
  switch (t->op) {
    case Op::Iff: return 1;
    case Op::Implies: return 2;
    case Op::Or: return 3;
    case Op::And: return 4;
    case Op::Eq:
    case Op::Lt:
    case Op::Le: return 5;
    case Op::Add:
    case Op::Sub: return 6;
    case Op::Mul:
    case Op::Div:
    case Op::Mod: return 7;
    case Op::Not:
    case Op::Neg: return 8;
    case Op::Ite:
    case Op::Forall:
    case Op::Exists: return 0;
    default: return 9;
  }
}

void print(std::ostream& os, TermRef t);

void print_child(std::ostream& os, TermRef c, int parent_prec, bool strict) {
  int p = precedence(c);
  bool paren = strict ? p <= parent_prec : p < parent_prec;
  if (paren) os << '(';
  print(os, c);
  if (paren) os << ')';
}

void print_infix(std::ostream& os, TermRef t, const char* op) {
  int p = precedence(t);
  for (std::size_t i = 0; i < t->args.size(); ++i) {
    if (i) os << ' ' << op << ' ';
    // Left operands may share the precedence level; right operands may not
    // (except for associative And/Or).
    bool assoc = t->op == Op::And || t->op == Op::Or || t->op == Op::Add || t->op == Op::Mul;
    print_child(os, t->args[i], p, i > 0 && !assoc);
  }
}

void print_args(std::ostream& os, const std::vector<TermRef>& args, std::size_t from = 0) {
  for (std::size_t i = from; i < args.size(); ++i) {
    if (i > from) os << ", ";
    print(os, args[i]);
  }
}

void print(std::ostream& os, TermRef t) {
  switch (t->op) {
    case Op::BoolLit: os << (t->value ? "true" : "false"); return;
    case Op::IntLit: os << t->value; return;
    case Op::Null: os << "null"; return;
    case Op::Const: os << t->name; return;
    case Op::Not:
      os << '!';
      print_child(os, t->args[0], precedence(t), false);
      return;
    case Op::Neg:
      os << '-';
      print_child(os, t->args[0], precedence(t), true);
      return;
    case Op::And: print_infix(os, t, "&&"); return;
    case Op::Or: print_infix(os, t, "||"); return;
    case Op::Implies:
      print_child(os, t->args[0], precedence(t), true);
      os << " ==> ";
      print_child(os, t->args[1], precedence(t), false);
      return;
    case Op::Iff: print_infix(os, t, "<==>"); return;
    case Op::Eq: print_infix(os, t, "=="); return;
    case Op::Lt: print_infix(os, t, "<"); return;
    case Op::Le: print_infix(os, t, "<="); return;
    case Op::Add: print_infix(os, t, "+"); return;
    case Op::Sub: print_infix(os, t, "-"); return;
    case Op::Mul: print_infix(os, t, "*"); return;
    case Op::Div: print_infix(os, t, "/"); return;
    case Op::Mod: print_infix(os, t, "%"); return;
    case Op::Ite:
      os << "if ";
      print(os, t->args[0]);
      os << " then ";
      print(os, t->args[1]);
      os << " else ";
      print(os, t->args[2]);
      return;
    case Op::Select:
      print(os, t->args[0]);
      os << '[';
      print_args(os, t->args, 1);
      os << ']';
      return;
    case Op::Store:
      os << "store(";
      print_args(os, t->args);
      os << ')';
      return;
    case Op::Length:
      os << "len(";
      print(os, t->args[0]);
      os << ')';
      return;
    case Op::Apply:
      os << t->name << '(';
      print_args(os, t->args);
      os << ')';
      return;
    case Op::Forall:
    case Op::Exists:
      os << (t->op == Op::Forall ? "forall " : "exists ") << t->bound()->name << ": "
         << to_string(t->bound()->sort) << " :: ";
      print(os, t->body());
      return;
  }
}

}  // namespace

std::string to_string(TermRef t) {
  std::ostringstream os;
  print(os, t);
  return os.str();
}

}  // namespace minidafny::logic
