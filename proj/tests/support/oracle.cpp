#include "oracle.hpp"

#include <array>
#include <functional>

namespace minidafny::testing {

using logic::Op;
using logic::Sort;
using logic::TermRef;
using I = __int128;

namespace {

struct Heap {
  std::string base;
  std::vector<std::array<I, 3>> writes;  // newest last
};

class Oracle {
 public:
  explicit Oracle(const prover::Model& m) : m_(m) {}

  std::optional<I> value(TermRef t) {
    const auto& a = t->args;
    switch (t->op) {
      case Op::BoolLit:
      case Op::IntLit:
        return I(t->value);
      case Op::Null:
        return I(0);
      case Op::Const:
        if (t->sort == Sort::Bool) {
          auto it = m_.bools.find(t->name);
          return I(it != m_.bools.end() && it->second);
        } else {
          auto it = m_.ints.find(t->name);
          return I(it == m_.ints.end() ? 0 : it->second);
        }
      case Op::Not: {
        auto v = value(a[0]);
        if (!v) return v;
        return I(*v == 0);
      }
      case Op::And:
      case Op::Or: {
        // Every operand must be evaluable, unlike a short-circuiting evaluator.
        bool any_true = false, all_true = true;
        for (TermRef c : a) {
          auto v = value(c);
          if (!v) return v;
          any_true |= *v != 0;
          all_true &= *v != 0;
        }
        return I(t->op == Op::And ? all_true : any_true);
      }
      case Op::Implies: {
        auto p = value(a[0]), q = value(a[1]);
        if (!p || !q) return std::nullopt;
        return I(*p == 0 || *q != 0);
      }
      case Op::Iff: {
        auto p = value(a[0]), q = value(a[1]);
        if (!p || !q) return std::nullopt;
        return I((*p != 0) == (*q != 0));
      }
      case Op::Ite: {
        auto c = value(a[0]), x = value(a[1]), y = value(a[2]);
        if (!c || !x || !y) return std::nullopt;
        return *c ? x : y;
      }
      case Op::Eq:
      case Op::Lt:
      case Op::Le: {
        auto p = value(a[0]), q = value(a[1]);
        if (!p || !q) return std::nullopt;
        if (t->op == Op::Eq) return I(*p == *q);
        return I(t->op == Op::Lt ? *p < *q : *p <= *q);
      }
      case Op::Add:
      case Op::Sub:
      case Op::Mul: {
        auto p = value(a[0]), q = value(a[1]);
        if (!p || !q) return std::nullopt;
        I r = t->op == Op::Add ? *p + *q : t->op == Op::Sub ? *p - *q : *p * *q;
        return in_range(r);
      }
      case Op::Neg: {
        auto p = value(a[0]);
        if (!p) return p;
        return in_range(-*p);
      }
      case Op::Div:
      case Op::Mod: {
        auto p = value(a[0]), q = value(a[1]);
        if (!p || !q) return std::nullopt;
        if (*q == 0) return t->op == Op::Div ? I(0) : *p;
        I r = *p % *q;
        if (r < 0) r += *q < 0 ? -*q : *q;
        return t->op == Op::Mod ? r : in_range((*p - r) / *q);
      }
      case Op::Select: {
        auto h = heap(a[0]);
        auto r = value(a[1]), i = value(a[2]);
        if (!h || !r || !i) return std::nullopt;
        for (auto it = h->writes.rbegin(); it != h->writes.rend(); ++it)
          if ((*it)[0] == *r && (*it)[1] == *i) return (*it)[2];
        auto tab = m_.heaps.find(h->base);
        if (tab == m_.heaps.end()) return I(0);
        auto e = tab->second.entries.find({static_cast<std::int64_t>(*r), static_cast<std::int64_t>(*i)});
        return I(e == tab->second.entries.end() ? tab->second.default_value : e->second);
      }
      case Op::Length: {
        auto r = value(a[0]);
        if (!r) return r;
        auto it = m_.lengths.find(static_cast<std::int64_t>(*r));
        return I(it == m_.lengths.end() ? 0 : it->second);
      }
      case Op::Apply: {
        auto it = m_.ground_values.find(t);
        if (it == m_.ground_values.end()) return std::nullopt;
        return I(it->second);
      }
      case Op::Store:
      case Op::Forall:
      case Op::Exists:
        return std::nullopt;
    }
    return std::nullopt;
  }

 private:
  static std::optional<I> in_range(I v) {
    if (v > I(INT64_MAX) || v < I(INT64_MIN)) return std::nullopt;
    return v;
  }

  std::optional<Heap> heap(TermRef t) {
    if (t->op == Op::Const) return Heap{t->name, {}};
    if (t->op == Op::Ite) {
      auto c = value(t->args[0]);
      if (!c) return std::nullopt;
      return heap(*c ? t->args[1] : t->args[2]);
    }
    if (t->op != Op::Store) return std::nullopt;
    auto h = heap(t->args[0]);
    auto r = value(t->args[1]), i = value(t->args[2]), v = value(t->args[3]);
    if (!h || !r || !i || !v) return std::nullopt;
    h->writes.push_back({*r, *i, *v});
    return h;
  }

  const prover::Model& m_;
};

}  // namespace

std::optional<std::int64_t> oracle_value(TermRef t, const prover::Model& m) {
  auto v = Oracle(m).value(t);
  if (!v) return std::nullopt;
  return static_cast<std::int64_t>(*v);
}

std::optional<bool> oracle_holds(TermRef t, const prover::Model& m) {
  auto v = oracle_value(t, m);
  if (!v) return std::nullopt;
  return *v != 0;
}

TermRef random_lia(logic::TermManager& tm, std::mt19937_64& rng, const std::vector<TermRef>& vars,
                   int depth) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto linear = [&]() {
    TermRef sum = tm.mk_int(pick(-6, 6));
    int terms = pick(1, 2);
    for (int k = 0; k < terms; ++k) {
      TermRef v = vars[pick(0, static_cast<int>(vars.size()) - 1)];
      int c = pick(-3, 3);
      if (c == 0) c = 2;
      sum = tm.mk_add(sum, c == 1 ? v : tm.mk_mul(tm.mk_int(c), v));
    }
    return sum;
  };
  std::function<TermRef(int)> go = [&](int d) -> TermRef {
    if (d == 0 || pick(0, 3) == 0) {
      TermRef l = linear();
      TermRef r = linear();
      switch (pick(0, 3)) {
        case 0: return tm.mk_lt(l, r);
        case 1: return tm.mk_le(l, r);
        case 2: return tm.mk_eq(l, r);
        default: return tm.mk_ne(l, r);
      }
    }
    int conn = pick(0, 3);
    TermRef x = go(d - 1);
    if (conn == 3) return tm.mk_not(x);
    TermRef y = go(d - 1);  // sequenced so the stream is compiler independent
    if (conn == 0) return tm.mk_and(x, y);
    if (conn == 1) return tm.mk_or(x, y);
    return tm.mk_implies(x, y);
  };
  return go(depth);
}

std::optional<std::map<std::string, std::int64_t>> brute_force_sat(TermRef f,
                                                                   const std::vector<TermRef>& vars,
                                                                   std::int64_t lo, std::int64_t hi) {
  prover::Model m;
  for (TermRef v : vars) m.ints[v->name] = lo;
  while (true) {
    if (oracle_holds(f, m).value_or(false)) return m.ints;
    std::size_t k = 0;
    while (k < vars.size() && m.ints[vars[k]->name] == hi) m.ints[vars[k++]->name] = lo;
    if (k == vars.size()) return std::nullopt;
    ++m.ints[vars[k]->name];
  }
}

}  // namespace minidafny::testing
