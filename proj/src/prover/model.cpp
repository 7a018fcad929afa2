#include "minidafny/prover/model.hpp"

#include <sstream>

namespace minidafny::prover {

using logic::Op;
using logic::Sort;

std::int64_t euclid_div(std::int64_t a, std::int64_t b) {
  if (b == 0) return 0;
  std::int64_t q = a / b, r = a % b;
  if (r < 0) q += b > 0 ? -1 : 1;
  return q;
}

std::int64_t euclid_mod(std::int64_t a, std::int64_t b) {
  if (b == 0) return a;
  std::int64_t r = a % b;
  if (r < 0) r += b > 0 ? b : -b;
  return r;
}

std::int64_t Model::length_of(std::int64_t ref) const {
  auto it = lengths.find(ref);
  return it == lengths.end() ? 0 : it->second;
}

std::int64_t Model::heap_value(const std::string& heap, std::int64_t ref, std::int64_t index) const {
  auto h = heaps.find(heap);
  if (h == heaps.end()) return 0;
  auto it = h->second.entries.find({ref, index});
  return it == h->second.entries.end() ? h->second.default_value : it->second;
}

void Model::derive_arrays(const std::map<std::string, bool>& ref_consts) {
  for (const auto& [name, is_bool] : ref_consts) {
    ArrayValue a;
    auto it = ints.find(name);
    a.ref = it == ints.end() ? 0 : it->second;
    a.bool_elements = is_bool;
    if (a.ref == 0) {
      a.is_null = true;
    } else {
      a.length = length_of(a.ref);
      auto h = heaps.find(is_bool ? "$heapb" : "$heap");
      if (h != heaps.end()) {
        a.default_value = h->second.default_value;
        for (const auto& [key, v] : h->second.entries)
          if (key.first == a.ref && key.second >= 0 && key.second < a.length) a.entries[key.second] = v;
      }
    }
    arrays[name] = std::move(a);
  }
}

std::vector<std::string> Model::describe(const std::vector<std::string>& names) const {
  std::vector<std::string> out;
  for (const auto& n : names) {
    std::ostringstream os;
    if (auto a = arrays.find(n); a != arrays.end()) {
      const ArrayValue& v = a->second;
      os << n << " = ";
      if (v.is_null) {
        os << "null";
      } else {
        os << '[';
        for (std::int64_t i = 0; i < v.length && i < 32; ++i) {
          if (i) os << ", ";
          auto e = v.entries.find(i);
          std::int64_t x = e == v.entries.end() ? v.default_value : e->second;
          if (v.bool_elements) os << (x ? "true" : "false");
          else os << x;
        }
        if (v.length > 32) os << ", ...";
        os << "] (length " << v.length << ')';
      }
    } else if (auto i = ints.find(n); i != ints.end()) {
      os << n << " = " << i->second;
    } else if (auto b = bools.find(n); b != bools.end()) {
      os << n << " = " << (b->second ? "true" : "false");
    } else {
      continue;
    }
    out.push_back(os.str());
  }
  return out;
}

namespace {

std::optional<std::int64_t> checked(bool overflow, std::int64_t r) {
  if (overflow) return std::nullopt;
  return r;
}

}  // namespace

std::optional<Evaluator::HeapView> Evaluator::heap(TermRef t) {
  if (t->op == Op::Const) return HeapView{t->name, {}};
  if (t->op != Op::Store) return std::nullopt;
  auto base = heap(t->args[0]);
  if (!base) return std::nullopt;
  auto r = eval(t->args[1]), i = eval(t->args[2]), v = eval(t->args[3]);
  if (!r || !i || !v) return std::nullopt;
  base->writes.emplace_back(*r, *i, *v);
  return base;
}

std::int64_t Evaluator::apply_value(TermRef t, const std::vector<std::int64_t>& args) {
  if (env_.empty()) {
    auto it = m_.ground_values.find(t);
    if (it != m_.ground_values.end()) return it->second;
  }
  for (const auto& [g, v] : m_.ground_values) {
    if (g->op != Op::Apply || g->name != t->name || g->args.size() != t->args.size()) continue;
    bool same = true;
    for (std::size_t k = 0; k < g->args.size() && same; ++k) {
      Sort s = g->args[k]->sort;
      if (s == Sort::HeapInt || s == Sort::HeapBool) {
        same = g->args[k] == t->args[k];
      } else {
        auto saved = std::move(env_);
        env_.clear();
        auto gv = eval(g->args[k]);
        env_ = std::move(saved);
        same = gv && *gv == args[k];
      }
    }
    if (same) return v;
  }
  return 0;
}

std::optional<std::int64_t> Evaluator::eval(TermRef t) {
  const auto& a = t->args;
  switch (t->op) {
    case Op::BoolLit:
    case Op::IntLit:
      return t->value;
    case Op::Null:
      return 0;
    case Op::Const: {
      if (auto e = env_.find(t->name); e != env_.end()) return e->second;
      if (t->sort == Sort::Bool) {
        auto b = m_.bools.find(t->name);
        return b != m_.bools.end() && b->second ? 1 : 0;
      }
      auto i = m_.ints.find(t->name);
      return i == m_.ints.end() ? 0 : i->second;
    }
    case Op::Not: {
      auto v = eval(a[0]);
      if (!v) return v;
      return *v ? 0 : 1;
    }
    case Op::And:
    case Op::Or: {
      bool is_and = t->op == Op::And;
      for (TermRef c : a) {
        auto v = eval(c);
        if (!v) return v;
        if ((*v != 0) != is_and) return is_and ? 0 : 1;
      }
      return is_and ? 1 : 0;
    }
    case Op::Implies: {
      auto p = eval(a[0]);
      if (!p) return p;
      if (!*p) return 1;
      return eval(a[1]);
    }
    case Op::Iff: {
      auto p = eval(a[0]), q = eval(a[1]);
      if (!p || !q) return std::nullopt;
      return (*p != 0) == (*q != 0) ? 1 : 0;
    }
    case Op::Ite: {
      auto c = eval(a[0]);
      if (!c) return c;
      return eval(*c ? a[1] : a[2]);
    }
    case Op::Eq:
    case Op::Lt:
    case Op::Le: {
      auto p = eval(a[0]), q = eval(a[1]);
      if (!p || !q) return std::nullopt;
      bool r = t->op == Op::Eq ? *p == *q : t->op == Op::Lt ? *p < *q : *p <= *q;
      return r ? 1 : 0;
    }
    case Op::Add:
    case Op::Sub:
    case Op::Mul: {
      auto p = eval(a[0]), q = eval(a[1]);
      if (!p || !q) return std::nullopt;
      std::int64_t r;
      bool o = t->op == Op::Add   ? __builtin_add_overflow(*p, *q, &r)
               : t->op == Op::Sub ? __builtin_sub_overflow(*p, *q, &r)
                                  : __builtin_mul_overflow(*p, *q, &r);
      return checked(o, r);
    }
    case Op::Neg: {
      auto p = eval(a[0]);
      if (!p || *p == INT64_MIN) return std::nullopt;
      return -*p;
    }
    case Op::Div:
    case Op::Mod: {
      auto p = eval(a[0]), q = eval(a[1]);
      if (!p || !q) return std::nullopt;
      if (*p == INT64_MIN && *q == -1) return std::nullopt;
      return t->op == Op::Div ? euclid_div(*p, *q) : euclid_mod(*p, *q);
    }
    case Op::Select: {
      auto h = heap(a[0]);
      auto r = eval(a[1]), i = eval(a[2]);
      if (!h || !r || !i) return std::nullopt;
      for (auto it = h->writes.rbegin(); it != h->writes.rend(); ++it)
        if (std::get<0>(*it) == *r && std::get<1>(*it) == *i) return std::get<2>(*it);
      return m_.heap_value(h->base, *r, *i);
    }
    case Op::Store:
      return std::nullopt;
    case Op::Length: {
      auto r = eval(a[0]);
      if (!r) return r;
      return m_.length_of(*r);
    }
    case Op::Apply: {
      std::vector<std::int64_t> vals;
      for (TermRef x : a) {
        if (x->sort == Sort::HeapInt || x->sort == Sort::HeapBool) {
          vals.push_back(0);
          continue;
        }
        auto v = eval(x);
        if (!v) return v;
        vals.push_back(*v);
      }
      if (apply_hook) return apply_hook(t, vals);
      return apply_value(t, vals);
    }
    case Op::Forall:
    case Op::Exists: {
      bool is_forall = t->op == Op::Forall;
      const auto& dom = t->bound()->sort == Sort::Ref ? ref_domain : int_domain;
      const std::string& x = t->bound()->name;
      auto saved = env_.find(x) == env_.end() ? std::optional<std::int64_t>{} : env_[x];
      std::optional<std::int64_t> result = is_forall ? 1 : 0;
      for (std::int64_t v : dom) {
        env_[x] = v;
        auto b = eval(t->body());
        if (!b) {
          result = std::nullopt;
          break;
        }
        if ((*b != 0) != is_forall) {
          result = is_forall ? 0 : 1;
          break;
        }
      }
      if (saved) env_[x] = *saved;
      else env_.erase(x);
      return result;
    }
  }
  return std::nullopt;
}

}  // namespace minidafny::prover
