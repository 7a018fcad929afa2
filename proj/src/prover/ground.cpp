#include "minidafny/prover/ground.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "minidafny/prover/sat.hpp"

namespace minidafny::prover {

using logic::Op;
using logic::Sort;
using logic::TermManager;

namespace {

using i64 = std::int64_t;

struct Linear {
  std::map<int, i64> coef;
  i64 c = 0;
};

struct Abstraction {
  std::vector<TermRef> args;
  TermRef var;
};

i64 checked_add(i64 a, i64 b) {
  i64 r;
  if (__builtin_add_overflow(a, b, &r)) throw ArithmeticOverflow();
  return r;
}
i64 checked_mul(i64 a, i64 b) {
  i64 r;
  if (__builtin_mul_overflow(a, b, &r)) throw ArithmeticOverflow();
  return r;
}

bool is_heap(TermRef t) { return t->sort == Sort::HeapInt || t->sort == Sort::HeapBool; }

class Ground : public TheoryHook {
 public:
  Ground(TermManager& tm, const GroundOptions& o) : tm_(tm), opts_(o) {}

  GroundResult run(const std::vector<TermRef>& input);

  std::vector<Lit> check(const std::vector<Lit>& trail, bool complete) override;

 private:
  // Purification: every non-arithmetic Int/Ref term becomes a fresh variable.
  TermRef purify(TermRef t);
  TermRef abstract(const std::string& group, std::vector<TermRef> args, TermRef key);
  TermRef fresh(Sort s) { return tm_.mk_const(tm_.fresh_name("$k"), s); }
  void add_consistency();

  // Boolean encoding.
  Lit encode(TermRef f);
  Lit atom(Linear e, bool eq);
  Linear linear(TermRef t);
  int int_var(TermRef c);

  std::optional<std::map<int, i64>> solve_theory(const std::vector<Lit>& lits);
  LinConstraint constraint_of(Lit l) const;

  void minimize(const std::vector<TermRef>& pure, Model& tmp);
  Model build_model(const std::vector<TermRef>& input, const Model& tmp);

  TermManager& tm_;
  GroundOptions opts_;
  std::unordered_map<TermRef, TermRef> memo_;
  std::unordered_map<TermRef, TermRef> abs_memo_;
  std::map<std::string, std::vector<Abstraction>> groups_;
  std::vector<TermRef> defs_;
  bool unsupported_ = false;

  SatSolver sat_;
  Lit true_lit_ = 0;
  std::unordered_map<TermRef, Lit> lit_memo_;
  std::map<std::tuple<std::map<int, i64>, i64, bool>, int> atoms_;
  std::map<int, LinConstraint> atom_of_var_;
  std::map<TermRef, int, logic::TermIdLess> int_vars_;
  std::vector<TermRef> int_var_terms_;
  std::map<TermRef, int, logic::TermIdLess> bool_vars_;
  std::map<int, i64> solution_;
};

std::optional<i64> constant_value(TermRef t) {
  switch (t->op) {
    case Op::IntLit:
      return t->value;
    case Op::Neg: {
      auto a = constant_value(t->args[0]);
      if (!a) return a;
      return checked_mul(-1, *a);
    }
    case Op::Add:
    case Op::Sub:
    case Op::Mul: {
      auto a = constant_value(t->args[0]), b = constant_value(t->args[1]);
      if (!a || !b) return std::nullopt;
      if (t->op == Op::Add) return checked_add(*a, *b);
      if (t->op == Op::Sub) return checked_add(*a, checked_mul(-1, *b));
      return checked_mul(*a, *b);
    }
    default:
      return std::nullopt;
  }
}

TermRef Ground::abstract(const std::string& group, std::vector<TermRef> args, TermRef key) {
  auto it = abs_memo_.find(key);
  if (it != abs_memo_.end()) return it->second;
  TermRef v = fresh(key->sort == Sort::Bool ? Sort::Bool : Sort::Int);
  abs_memo_[key] = v;
  groups_[group].push_back({std::move(args), v});
  return v;
}

TermRef Ground::purify(TermRef t) {
  if (auto it = memo_.find(t); it != memo_.end()) return it->second;
  TermRef out = t;
  const auto& a = t->args;
  switch (t->op) {
    case Op::BoolLit:
    case Op::IntLit:
    case Op::Null:
    case Op::Const:
      break;
    case Op::Ite: {
      TermRef c = purify(a[0]), x = purify(a[1]), y = purify(a[2]);
      if (t->sort == Sort::Bool) {
        out = tm_.mk_ite(c, x, y);
        break;
      }
      TermRef key = tm_.mk_ite(c, x, y);
      if (key->op != Op::Ite) {
        out = key;
        break;
      }
      auto it = abs_memo_.find(key);
      if (it != abs_memo_.end()) {
        out = it->second;
        break;
      }
      TermRef v = fresh(t->sort == Sort::Ref ? Sort::Ref : Sort::Int);
      abs_memo_[key] = v;
      defs_.push_back(tm_.mk_ite(c, tm_.mk_eq(v, x), tm_.mk_eq(v, y)));
      out = v;
      break;
    }
    case Op::Select: {
      TermRef h = a[0];
      if (h->op == Op::Store) {
        // select(store(h, r2, i2, v), r, j) = if r == r2 && j == i2 then v else select(h, r, j)
        TermRef hit = tm_.mk_and(tm_.mk_eq(a[1], h->args[1]), tm_.mk_eq(a[2], h->args[2]));
        out = purify(tm_.mk_ite(hit, h->args[3], tm_.mk_select(h->args[0], a[1], a[2])));
        break;
      }
      if (h->op != Op::Const) {
        unsupported_ = true;
        out = fresh(t->sort);
        break;
      }
      TermRef r = purify(a[1]), j = purify(a[2]);
      out = abstract("sel:" + h->name, {r, j}, tm_.mk_select(h, r, j));
      break;
    }
    case Op::Length: {
      TermRef r = purify(a[0]);
      TermRef key = tm_.mk_length(r);
      bool known = abs_memo_.count(key) > 0;
      out = abstract("len", {r}, key);
      if (!known) defs_.push_back(tm_.mk_ge(out, tm_.mk_int(0)));
      break;
    }
    case Op::Apply: {
      std::vector<TermRef> args;
      for (TermRef x : a) args.push_back(is_heap(x) ? x : purify(x));
      out = abstract("app:" + t->name, args, tm_.mk_apply(t->name, t->sort, args));
      break;
    }
    case Op::Mul: {
      TermRef x = purify(a[0]), y = purify(a[1]);
      if (constant_value(x) || constant_value(y)) {
        out = tm_.mk_mul(x, y);
      } else {
        out = abstract("mul", {x, y}, tm_.mk_mul(x, y));
      }
      break;
    }
    case Op::Div:
    case Op::Mod: {
      TermRef x = purify(a[0]), y = purify(a[1]);
      auto k = constant_value(y);
      if (!k) {
        out = abstract(t->op == Op::Div ? "div" : "mod", {x, y},
                       t->op == Op::Div ? tm_.mk_div(x, y) : tm_.mk_mod(x, y));
        break;
      }
      if (*k == 0) {
        out = t->op == Op::Div ? tm_.mk_int(0) : x;
        break;
      }
      // x = k*q + m, 0 <= m < |k|
      TermRef qkey = tm_.mk_div(x, tm_.mk_int(*k));
      TermRef mkey = tm_.mk_mod(x, tm_.mk_int(*k));
      if (!abs_memo_.count(qkey)) {
        TermRef q = fresh(Sort::Int), m = fresh(Sort::Int);
        abs_memo_[qkey] = q;
        abs_memo_[mkey] = m;
        defs_.push_back(tm_.mk_eq(x, tm_.mk_add(tm_.mk_mul(tm_.mk_int(*k), q), m)));
        defs_.push_back(tm_.mk_le(tm_.mk_int(0), m));
        defs_.push_back(tm_.mk_le(m, tm_.mk_int(*k > 0 ? *k - 1 : -*k - 1)));
      }
      out = abs_memo_[t->op == Op::Div ? qkey : mkey];
      break;
    }
    case Op::Eq:
      if (is_heap(a[0])) {
        unsupported_ = true;
        out = fresh(Sort::Bool);
        break;
      }
      out = tm_.rebuild(t, {purify(a[0]), purify(a[1])});
      break;
    case Op::Store:
    case Op::Forall:
    case Op::Exists:
      unsupported_ = true;
      out = fresh(t->sort == Sort::Bool ? Sort::Bool : Sort::Int);
      break;
    default: {
      std::vector<TermRef> args;
      for (TermRef x : a) args.push_back(purify(x));
      out = tm_.rebuild(t, std::move(args));
      break;
    }
  }
  memo_[t] = out;
  return out;
}

void Ground::add_consistency() {
  for (const auto& [group, entries] : groups_) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      for (std::size_t j = i + 1; j < entries.size(); ++j) {
        const auto& x = entries[i];
        const auto& y = entries[j];
        std::vector<TermRef> same;
        bool possible = true;
        for (std::size_t k = 0; k < x.args.size(); ++k) {
          TermRef p = x.args[k], q = y.args[k];
          if (p == q) continue;
          if (is_heap(p)) {
            possible = false;
            break;
          }
          same.push_back(p->sort == Sort::Bool ? tm_.mk_iff(p, q) : tm_.mk_eq(p, q));
        }
        if (!possible) continue;
        TermRef eq = x.var->sort == Sort::Bool ? tm_.mk_iff(x.var, y.var) : tm_.mk_eq(x.var, y.var);
        defs_.push_back(tm_.mk_implies(tm_.mk_and(same), eq));
      }
    }
  }
}

int Ground::int_var(TermRef c) {
  auto [it, fresh_var] = int_vars_.emplace(c, static_cast<int>(int_var_terms_.size()));
  if (fresh_var) int_var_terms_.push_back(c);
  return it->second;
}

Linear Ground::linear(TermRef t) {
  Linear out;
  auto add_scaled = [&](const Linear& x, i64 k) {
    for (const auto& [v, c] : x.coef) {
      i64 n = checked_add(out.coef[v], checked_mul(k, c));
      if (n == 0) out.coef.erase(v);
      else out.coef[v] = n;
    }
    out.c = checked_add(out.c, checked_mul(k, x.c));
  };
  switch (t->op) {
    case Op::IntLit:
      out.c = t->value;
      return out;
    case Op::Null:
      return out;
    case Op::Const:
      out.coef[int_var(t)] = 1;
      return out;
    case Op::Add:
      add_scaled(linear(t->args[0]), 1);
      add_scaled(linear(t->args[1]), 1);
      return out;
    case Op::Sub:
      add_scaled(linear(t->args[0]), 1);
      add_scaled(linear(t->args[1]), -1);
      return out;
    case Op::Neg:
      add_scaled(linear(t->args[0]), -1);
      return out;
    case Op::Mul: {
      if (auto k = constant_value(t->args[0])) add_scaled(linear(t->args[1]), *k);
      else if (auto k2 = constant_value(t->args[1])) add_scaled(linear(t->args[0]), *k2);
      else throw std::logic_error("nonlinear term survived purification");
      return out;
    }
    default:
      throw std::logic_error("unexpected term in linear arithmetic: " + logic::to_string(t));
  }
}

Lit Ground::atom(Linear e, bool eq) {
  if (e.coef.empty()) return (eq ? e.c == 0 : e.c <= 0) ? true_lit_ : -true_lit_;
  i64 g = 0;
  for (const auto& [v, k] : e.coef) g = std::gcd(g, k < 0 ? -k : k);
  if (eq && e.c % g != 0) return -true_lit_;
  if (eq && e.coef.begin()->second < 0) g = -g;
  for (auto& [v, k] : e.coef) k /= g;
  if (eq) e.c /= g;
  else e.c = e.c >= 0 ? (e.c + g - 1) / g : -((-e.c) / g);

  auto key = std::make_tuple(e.coef, e.c, eq);
  if (auto it = atoms_.find(key); it != atoms_.end()) return it->second;
  if (!eq) {
    std::map<int, i64> neg;
    for (const auto& [v, k] : e.coef) neg[v] = -k;
    auto comp = atoms_.find(std::make_tuple(neg, checked_add(1, -e.c), false));
    if (comp != atoms_.end()) return -comp->second;
  }
  int v = sat_.new_var();
  atoms_[key] = v;
  atom_of_var_[v] = LinConstraint{e.coef, e.c, eq};
  if (eq) {
    Linear below = e, above;
    below.c = checked_add(below.c, 1);  // e <= -1
    for (const auto& [x, k] : e.coef) above.coef[x] = -k;
    above.c = checked_add(1, -e.c);  // e >= 1
    sat_.add_clause({v, atom(below, false), atom(above, false)});
  }
  return v;
}

Lit Ground::encode(TermRef f) {
  if (auto it = lit_memo_.find(f); it != lit_memo_.end()) return it->second;
  Lit out = 0;
  const auto& a = f->args;
  switch (f->op) {
    case Op::BoolLit:
      out = f->value ? true_lit_ : -true_lit_;
      break;
    case Op::Const: {
      out = sat_.new_var();
      bool_vars_[f] = out;
      break;
    }
    case Op::Not:
      out = -encode(a[0]);
      break;
    case Op::And:
    case Op::Or: {
      bool is_and = f->op == Op::And;
      std::vector<Lit> kids;
      for (TermRef c : a) kids.push_back(encode(c));
      out = sat_.new_var();
      // and: out -> k_i, (all k_i) -> out; or is the dual.
      std::vector<Lit> big{is_and ? out : -out};
      for (Lit k : kids) {
        sat_.add_clause(is_and ? std::vector<Lit>{-out, k} : std::vector<Lit>{out, -k});
        big.push_back(is_and ? -k : k);
      }
      sat_.add_clause(big);
      break;
    }
    case Op::Implies:
      out = encode(tm_.mk_or(tm_.mk_not(a[0]), a[1]));
      break;
    case Op::Iff: {
      Lit p = encode(a[0]), q = encode(a[1]);
      out = sat_.new_var();
      sat_.add_clause({-out, -p, q});
      sat_.add_clause({-out, p, -q});
      sat_.add_clause({out, p, q});
      sat_.add_clause({out, -p, -q});
      break;
    }
    case Op::Ite: {
      Lit c = encode(a[0]), p = encode(a[1]), q = encode(a[2]);
      out = sat_.new_var();
      sat_.add_clause({-out, -c, p});
      sat_.add_clause({-out, c, q});
      sat_.add_clause({out, -c, -p});
      sat_.add_clause({out, c, -q});
      sat_.add_clause({-out, p, q});
      sat_.add_clause({out, -p, -q});
      break;
    }
    case Op::Eq:
    case Op::Le:
    case Op::Lt: {
      Linear l = linear(a[0]), r = linear(a[1]);
      for (const auto& [v, k] : r.coef) {
        i64 n = checked_add(l.coef[v], -k);
        if (n == 0) l.coef.erase(v);
        else l.coef[v] = n;
      }
      l.c = checked_add(l.c, -r.c);
      if (f->op == Op::Lt) l.c = checked_add(l.c, 1);
      out = atom(std::move(l), f->op == Op::Eq);
      break;
    }
    default:
      throw std::logic_error("unexpected formula in boolean encoding: " + logic::to_string(f));
  }
  lit_memo_[f] = out;
  return out;
}

LinConstraint Ground::constraint_of(Lit l) const {
  LinConstraint c = atom_of_var_.at(l > 0 ? l : -l);
  if (l > 0) return c;
  // not (e <= 0)  <=>  -e + 1 <= 0
  for (auto& [v, k] : c.coef) k = -k;
  c.constant = checked_add(1, -c.constant);
  return c;
}

std::optional<std::map<int, i64>> Ground::solve_theory(const std::vector<Lit>& lits) {
  std::vector<LinConstraint> cs;
  for (Lit l : lits) cs.push_back(constraint_of(l));
  return omega_solve(cs, opts_.deadline);
}

std::vector<Lit> Ground::check(const std::vector<Lit>& trail, bool) {
  std::vector<Lit> lits;
  for (Lit l : trail) {
    auto it = atom_of_var_.find(l > 0 ? l : -l);
    if (it == atom_of_var_.end()) continue;
    if (l < 0 && it->second.equality) continue;
    lits.push_back(l);
  }
  auto sol = solve_theory(lits);
  if (sol) {
    solution_ = std::move(*sol);
    return {};
  }
  // Deletion-based core minimization.
  std::vector<Lit> core = lits;
  for (std::size_t i = 0; i < core.size();) {
    std::vector<Lit> without = core;
    without.erase(without.begin() + static_cast<std::ptrdiff_t>(i));
    if (!solve_theory(without)) core = std::move(without);
    else ++i;
  }
  std::vector<Lit> lemma;
  for (Lit l : core) lemma.push_back(-l);
  return lemma;
}

void Ground::minimize(const std::vector<TermRef>& pure, Model& tmp) {
  auto ok = [&]() {
    Evaluator ev(tmp);
    for (TermRef f : pure) {
      auto v = ev.holds(f);
      if (!v || !*v) return false;
    }
    return true;
  };
  if (!ok()) return;
  // Source-level constants first, then purification variables.
  std::vector<std::string> order;
  for (TermRef c : int_var_terms_)
    if (c->name.rfind("$k!", 0) != 0) order.push_back(c->name);
  for (TermRef c : int_var_terms_)
    if (c->name.rfind("$k!", 0) == 0) order.push_back(c->name);
  for (const auto& name : order) {
    i64& v = tmp.ints[name];
    auto attempt = [&](i64 cand) {
      i64 old = v;
      v = cand;
      if (ok()) return true;
      v = old;
      return false;
    };
    if (v == 0 || attempt(0)) continue;
    while (v / 2 != v && attempt(v / 2)) {
    }
    for (int step = 0; step < 16 && v != 0 && attempt(v > 0 ? v - 1 : v + 1); ++step) {
    }
  }
}

Model Ground::build_model(const std::vector<TermRef>& input, const Model& tmp) {
  Model m;
  Evaluator ev(tmp);
  std::map<std::string, bool> refs;
  for (TermRef f : input) {
    for (TermRef c : logic::free_consts(f)) {
      if (c->sort == Sort::Bool) {
        auto it = tmp.bools.find(c->name);
        m.bools[c->name] = it != tmp.bools.end() && it->second;
      } else if (c->sort == Sort::Int || c->sort == Sort::Ref) {
        auto it = tmp.ints.find(c->name);
        m.ints[c->name] = it == tmp.ints.end() ? 0 : it->second;
      }
    }
  }
  auto value_of = [&](TermRef t) { return ev.eval(t).value_or(0); };
  for (const auto& [group, entries] : groups_) {
    if (group.rfind("sel:", 0) == 0) {
      HeapTable& h = m.heaps[group.substr(4)];
      for (const auto& e : entries) h.entries[{value_of(e.args[0]), value_of(e.args[1])}] = value_of(e.var);
    } else if (group == "len") {
      for (const auto& e : entries) m.lengths[value_of(e.args[0])] = value_of(e.var);
    }
  }
  for (TermRef f : input)
    for (TermRef app : logic::collect(f, [](TermRef u) { return u->op == Op::Apply; }))
      if (auto it = memo_.find(app); it != memo_.end()) m.ground_values[app] = value_of(it->second);
  return m;
}

GroundResult Ground::run(const std::vector<TermRef>& input) {
  GroundResult res;
  try {
    std::vector<TermRef> pure;
    for (TermRef f : input) pure.push_back(purify(f));
    add_consistency();
    for (TermRef d : defs_) pure.push_back(d);
    if (unsupported_) {
      res.reason = "unsupported-fragment";
      return res;
    }
    true_lit_ = sat_.new_var();
    sat_.add_clause({true_lit_});
    for (TermRef f : pure) sat_.add_clause({encode(f)});
    if (sat_.solve(this, opts_.deadline) == SatSolver::Result::Unsat) {
      res.status = GroundResult::Status::Unsat;
      return res;
    }
    Model tmp;
    for (std::size_t v = 0; v < int_var_terms_.size(); ++v) {
      auto it = solution_.find(static_cast<int>(v));
      tmp.ints[int_var_terms_[v]->name] = it == solution_.end() ? 0 : it->second;
    }
    for (const auto& [c, var] : bool_vars_) tmp.bools[c->name] = sat_.value(var);
    if (opts_.minimize) minimize(pure, tmp);
    res.model = build_model(input, tmp);
    Evaluator ev(res.model);
    for (TermRef f : input) {
      auto v = ev.holds(f);
      if (!v || !*v) {
        res.reason = "unsupported-fragment";
        return res;
      }
    }
    res.status = GroundResult::Status::Sat;
  } catch (const ArithmeticOverflow&) {
    res = GroundResult{};
    res.reason = "unsupported-fragment";
  } catch (const DeadlineExceeded&) {
    res = GroundResult{};
    res.reason = "timeout";
  }
  return res;
}

}  // namespace

GroundResult decide_ground(const std::vector<TermRef>& formulas, TermManager& tm, const GroundOptions& opts) {
  return Ground(tm, opts).run(formulas);
}

}  // namespace minidafny::prover
