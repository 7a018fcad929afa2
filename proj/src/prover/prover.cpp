#include "minidafny/prover/prover.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <unordered_map>

namespace minidafny::prover {

using logic::Op;
using logic::Sort;
using logic::TermManager;

std::string_view to_string(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::Proved: return "proved";
    case Verdict::Kind::Counterexample: return "counterexample";
    case Verdict::Kind::Unknown: return "unknown";
  }
  return "unknown";
}

namespace {

class QuantifierCache {
 public:
  bool has(TermRef t) {
    auto it = memo_.find(t);
    if (it != memo_.end()) return it->second;
    bool r = t->is_quantifier();
    for (TermRef a : t->args)
      if (!r && has(a)) r = true;
    memo_[t] = r;
    return r;
  }

 private:
  std::unordered_map<TermRef, bool> memo_;
};

class Nnf {
 public:
  explicit Nnf(TermManager& tm) : tm_(tm) {}

  TermRef run(TermRef t, bool pos) {
    if (!q_.has(t)) return pos ? t : tm_.mk_not(t);
    auto key = std::make_pair(t, pos);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    TermRef out;
    const auto& a = t->args;
    switch (t->op) {
      case Op::Not:
        out = run(a[0], !pos);
        break;
      case Op::And:
      case Op::Or: {
        std::vector<TermRef> kids;
        for (TermRef c : a) kids.push_back(run(c, pos));
        out = (t->op == Op::And) == pos ? tm_.mk_and(kids) : tm_.mk_or(kids);
        break;
      }
      case Op::Implies:
        out = pos ? tm_.mk_or(run(a[0], false), run(a[1], true))
                  : tm_.mk_and(run(a[0], true), run(a[1], false));
        break;
      case Op::Iff:
        out = pos ? tm_.mk_and(tm_.mk_or(run(a[0], false), run(a[1], true)),
                               tm_.mk_or(run(a[0], true), run(a[1], false)))
                  : tm_.mk_or(tm_.mk_and(run(a[0], true), run(a[1], false)),
                              tm_.mk_and(run(a[0], false), run(a[1], true)));
        break;
      case Op::Ite:
        out = tm_.mk_and(tm_.mk_or(run(a[0], false), run(a[1], pos)),
                         tm_.mk_or(run(a[0], true), run(a[2], pos)));
        break;
      case Op::Forall:
      case Op::Exists: {
        TermRef body = run(t->body(), pos);
        bool forall = (t->op == Op::Forall) == pos;
        out = forall ? tm_.mk_forall(t->bound(), body) : tm_.mk_exists(t->bound(), body);
        break;
      }
      default:
        // A quantifier nested inside a term; left for the ground solver to reject.
        out = pos ? t : tm_.mk_not(t);
        break;
    }
    memo_[key] = out;
    return out;
  }

 private:
  struct PairHash {
    std::size_t operator()(const std::pair<TermRef, bool>& p) const {
      return std::hash<TermRef>()(p.first) * 2 + p.second;
    }
  };
  TermManager& tm_;
  QuantifierCache q_;
  std::unordered_map<std::pair<TermRef, bool>, TermRef, PairHash> memo_;
};

class Skolemizer {
 public:
  explicit Skolemizer(TermManager& tm) : tm_(tm) {}
  bool unsupported = false;

  TermRef run(TermRef t, bool under_forall) {
    if (!q_.has(t)) return t;
    auto key = std::make_pair(t, under_forall);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    TermRef out = t;
    switch (t->op) {
      case Op::And:
      case Op::Or: {
        std::vector<TermRef> kids;
        for (TermRef c : t->args) kids.push_back(run(c, under_forall));
        out = tm_.rebuild(t, std::move(kids));
        break;
      }
      case Op::Forall:
        out = tm_.mk_forall(t->bound(), run(t->body(), true));
        break;
      case Op::Exists: {
        if (under_forall) {
          unsupported = true;
          break;
        }
        // The bound constant itself serves as the witness.
        out = run(t->body(), false);
        break;
      }
      default:
        break;
    }
    memo_[key] = out;
    return out;
  }

 private:
  struct PairHash {
    std::size_t operator()(const std::pair<TermRef, bool>& p) const {
      return std::hash<TermRef>()(p.first) * 2 + p.second;
    }
  };
  TermManager& tm_;
  QuantifierCache q_;
  std::map<std::pair<TermRef, bool>, TermRef> memo_;
};

bool contains_uninterpreted(TermRef t) {
  return !logic::collect(t, [](TermRef u) {
            return u->op == Op::Select || u->op == Op::Apply || u->op == Op::Store ||
                   u->op == Op::Ite || u->is_quantifier();
          }).empty();
}

class Instantiator {
 public:
  struct Quant {
    TermRef proxy;
    std::vector<TermRef> vars;
    TermRef body;
    std::set<std::vector<std::uint32_t>> done;
  };

  Instantiator(TermManager& tm, int cap) : tm_(tm), cap_(cap) {}

  std::vector<TermRef> ground;
  std::vector<Quant> quants;
  std::vector<TermRef> int_cands, ref_cands;
  int instances = 0;
  bool limit_hit = false;

  void add(TermRef f) { ground.push_back(abstract(f)); }

  void refresh_candidates() {
    for (; scanned_ < ground.size(); ++scanned_) {
      for (TermRef u : logic::collect(ground[scanned_], [](TermRef) { return true; })) {
        switch (u->op) {
          case Op::Const:
            offer(u);
            break;
          case Op::Null:
            offer(u);
            break;
          case Op::Select:
            offer(u->args[1]);
            offer(u->args[2]);
            break;
          case Op::Apply:
          case Op::Eq:
          case Op::Le:
          case Op::Lt:
            for (TermRef x : u->args) offer(x);
            break;
          default:
            break;
        }
      }
    }
  }

  bool add_instance(std::size_t qi, const std::vector<TermRef>& tuple) {
    std::vector<std::uint32_t> key;
    for (TermRef t : tuple) key.push_back(t->id);
    if (!quants[qi].done.insert(key).second) return false;
    if (instances >= cap_) {
      limit_hit = true;
      return false;
    }
    logic::Substitution sub;
    for (std::size_t k = 0; k < tuple.size(); ++k) sub[quants[qi].vars[k]] = tuple[k];
    TermRef proxy = quants[qi].proxy;
    TermRef inst = abstract(tm_.substitute(quants[qi].body, sub));
    ground.push_back(tm_.mk_or(tm_.mk_not(proxy), inst));
    ++instances;
    return true;
  }

  /// Instantiates every known universal at every candidate tuple.
  void round() {
    refresh_candidates();
    const std::size_t nq = quants.size();
    const auto ints = int_cands, refs = ref_cands;
    for (std::size_t qi = 0; qi < nq && !limit_hit; ++qi) {
      std::vector<const std::vector<TermRef>*> doms;
      std::vector<TermRef> bools{tm_.mk_true(), tm_.mk_false()};
      for (TermRef v : quants[qi].vars)
        doms.push_back(v->sort == Sort::Ref ? &refs : v->sort == Sort::Bool ? &bools : &ints);
      std::vector<std::size_t> idx(doms.size(), 0);
      bool empty = std::any_of(doms.begin(), doms.end(), [](auto* d) { return d->empty(); });
      while (!empty && !limit_hit) {
        std::vector<TermRef> tuple;
        for (std::size_t k = 0; k < doms.size(); ++k) tuple.push_back((*doms[k])[idx[k]]);
        add_instance(qi, tuple);
        std::size_t k = doms.size();
        while (k > 0) {
          --k;
          if (++idx[k] < doms[k]->size()) break;
          idx[k] = 0;
          if (k == 0) empty = true;
        }
        if (doms.empty()) break;
      }
    }
  }

 private:
  void offer(TermRef t) {
    if (t->sort == Sort::Ref && (t->op == Op::Const || t->op == Op::Null)) {
      if (seen_.insert(t).second) ref_cands.push_back(t);
    } else if (t->sort == Sort::Int && !contains_uninterpreted(t)) {
      if (seen_.insert(t).second) int_cands.push_back(t);
    }
  }

  TermRef abstract(TermRef t) {
    if (!q_.has(t)) return t;
    if (auto it = memo_.find(t); it != memo_.end()) return it->second;
    TermRef out = t;
    if (t->op == Op::Forall) {
      Quant q;
      TermRef body = t;
      while (body->op == Op::Forall) {
        q.vars.push_back(body->bound());
        body = body->body();
      }
      q.body = body;
      q.proxy = tm_.mk_const(tm_.fresh_name("$q"), Sort::Bool);
      out = q.proxy;
      quants.push_back(std::move(q));
    } else if (t->op == Op::And || t->op == Op::Or || t->op == Op::Not) {
      std::vector<TermRef> kids;
      for (TermRef c : t->args) kids.push_back(abstract(c));
      out = tm_.rebuild(t, std::move(kids));
    }
    memo_[t] = out;
    return out;
  }

  TermManager& tm_;
  int cap_;
  QuantifierCache q_;
  std::unordered_map<TermRef, TermRef> memo_;
  std::size_t scanned_ = 0;
  logic::TermSet seen_;
};

// Finds universals falsified by `m` over a finite domain drawn from the
// model and adds one violating instance per universal. Returns the number
// of instances added.
int model_based_instances(Instantiator& inst, const Model& m, TermManager& tm) {
  inst.refresh_candidates();
  Evaluator ev(m);
  std::map<std::int64_t, TermRef> int_terms, ref_terms;
  for (TermRef t : inst.int_cands)
    if (auto v = ev.eval(t)) int_terms.emplace(*v, t);
  for (TermRef t : inst.ref_cands)
    if (auto v = ev.eval(t)) ref_terms.emplace(*v, t);

  std::set<std::int64_t> ints;
  for (const auto& [v, t] : int_terms) {
    ints.insert(v);
    if (v > INT64_MIN) ints.insert(v - 1);
    if (v < INT64_MAX) ints.insert(v + 1);
  }
  for (const auto& [r, len] : m.lengths)
    for (std::int64_t i = 0; i < len && i < 1000; ++i) ints.insert(i);
  std::vector<std::int64_t> refs;
  for (const auto& [v, t] : ref_terms) refs.push_back(v);
  ev.int_domain.assign(ints.begin(), ints.end());
  ev.ref_domain = refs;

  auto term_for = [&](Sort s, std::int64_t v) -> TermRef {
    if (s == Sort::Ref) return ref_terms.at(v);
    if (s == Sort::Bool) return tm.mk_bool(v != 0);
    auto it = int_terms.find(v);
    return it != int_terms.end() ? it->second : tm.mk_int(v);
  };

  int added = 0;
  const std::size_t nq = inst.quants.size();
  for (std::size_t qi = 0; qi < nq; ++qi) {
    const auto& q = inst.quants[qi];
    auto p = m.bools.find(q.proxy->name);
    if (p == m.bools.end() || !p->second) continue;
    std::vector<std::vector<std::int64_t>> doms;
    std::size_t total = 1;
    for (TermRef v : q.vars) {
      if (v->sort == Sort::Ref) doms.push_back(refs);
      else if (v->sort == Sort::Bool) doms.push_back({0, 1});
      else doms.emplace_back(ints.begin(), ints.end());
      total *= std::max<std::size_t>(doms.back().size(), 1);
    }
    if (total > 200000) continue;
    std::vector<std::size_t> idx(doms.size(), 0);
    bool done = std::any_of(doms.begin(), doms.end(), [](const auto& d) { return d.empty(); });
    while (!done) {
      std::vector<TermRef> tuple;
      for (std::size_t k = 0; k < doms.size(); ++k) tuple.push_back(term_for(q.vars[k]->sort, doms[k][idx[k]]));
      logic::Substitution sub;
      for (std::size_t k = 0; k < tuple.size(); ++k) sub[q.vars[k]] = tuple[k];
      auto holds = ev.holds(tm.substitute(q.body, sub));
      if (holds && !*holds) {
        if (inst.add_instance(qi, tuple)) ++added;
        break;
      }
      std::size_t k = doms.size();
      done = true;
      while (k > 0) {
        --k;
        if (++idx[k] < doms[k].size()) {
          done = false;
          break;
        }
        idx[k] = 0;
      }
    }
  }
  return added;
}

// Values of function applications computed from the definitions, with
// arguments taken from a model. Bodies with quantifiers are not evaluated
// (finite enumeration would not be exact), nor applications whose
// precondition fails.
class FunctionOracle {
 public:
  FunctionOracle(const std::map<std::string, ir::FunctionDef>& defs, const Model& m, TermManager& tm)
      : defs_(defs), m_(m), tm_(tm) {}

  std::optional<std::int64_t> value(TermRef app, int depth = 0) {
    if (depth > kMaxDepth) return std::nullopt;
    auto d = defs_.find(app->name);
    if (d == defs_.end() || !d->second.body || quantified(d->second)) return std::nullopt;
    const ir::FunctionDef& def = d->second;
    logic::Substitution sub;
    std::vector<std::int64_t> key_vals;
    std::vector<TermRef> key_heaps;
    for (std::size_t k = 0; k < def.params.size() && k < app->args.size(); ++k) {
      TermRef p = def.params[k];
      if (p->sort == Sort::HeapInt || p->sort == Sort::HeapBool) {
        sub[p] = app->args[k];
        key_heaps.push_back(app->args[k]);
        continue;
      }
      auto v = eval(app->args[k], depth);
      if (!v) return std::nullopt;
      sub[p] = p->sort == Sort::Bool ? tm_.mk_bool(*v != 0) : tm_.mk_int(*v);
      key_vals.push_back(*v);
    }
    auto key = std::make_tuple(app->name, key_vals, key_heaps);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::optional<std::int64_t> out;
    bool pre = true;
    for (TermRef r : def.requires_) {
      auto ok = eval(tm_.substitute(r, sub), depth);
      if (!ok || !*ok) pre = false;
    }
    if (pre) out = eval(tm_.substitute(def.body, sub), depth);
    memo_[key] = out;
    return out;
  }

 private:
  static constexpr int kMaxDepth = 400;

  std::optional<std::int64_t> eval(TermRef t, int depth) {
    Evaluator ev(m_);
    bool failed = false;
    ev.apply_hook = [&](TermRef a, const std::vector<std::int64_t>&) -> std::optional<std::int64_t> {
      auto v = value(a, depth + 1);
      if (!v) failed = true;
      return v;
    };
    auto v = ev.eval(t);
    if (failed) return std::nullopt;
    return v;
  }

  bool quantified(const ir::FunctionDef& def) {
    auto it = quantified_.find(def.name);
    if (it != quantified_.end()) return it->second;
    bool q = logic::has_quantifier(def.body);
    for (TermRef r : def.requires_) q = q || logic::has_quantifier(r);
    quantified_[def.name] = q;
    return q;
  }

  const std::map<std::string, ir::FunctionDef>& defs_;
  const Model& m_;
  TermManager& tm_;
  std::map<std::tuple<std::string, std::vector<std::int64_t>, std::vector<TermRef>>,
           std::optional<std::int64_t>>
      memo_;
  std::map<std::string, bool> quantified_;
};

// Adds one unfolding `pre ==> app == body` for every application whose model
// value differs from its value under the definition.
int function_lemmas(std::vector<TermRef>& ground, logic::TermSet& added_lemmas, const Model& m,
                    TermManager& tm, const std::map<std::string, ir::FunctionDef>& defs) {
  std::vector<TermRef> apps;
  logic::TermSet seen;
  for (TermRef c : ground)
    for (TermRef a : logic::collect(c, [](TermRef u) { return u->op == Op::Apply; }))
      if (seen.insert(a).second) apps.push_back(a);
  FunctionOracle oracle(defs, m, tm);
  Evaluator ev(m);
  int added = 0;
  for (TermRef app : apps) {
    auto concrete = oracle.value(app);
    if (!concrete) continue;
    auto mv = ev.eval(app);
    if (mv && *mv == *concrete) continue;
    const ir::FunctionDef& def = defs.at(app->name);
    auto same = [&](TermRef x, TermRef y) { return x->sort == Sort::Bool ? tm.mk_iff(x, y) : tm.mk_eq(x, y); };
    logic::Substitution sub;
    for (std::size_t k = 0; k < def.params.size() && k < app->args.size(); ++k) sub[def.params[k]] = app->args[k];
    std::vector<TermRef> pre;
    for (TermRef r : def.requires_) pre.push_back(tm.substitute(r, sub));
    TermRef lemma = tm.mk_implies(tm.mk_and(pre), same(app, tm.substitute(def.body, sub)));
    if (added_lemmas.insert(lemma).second) {
      ground.push_back(lemma);
      ++added;
    }
  }
  return added;
}

}  // namespace

TermRef to_nnf(TermRef f, TermManager& tm) { return Nnf(tm).run(f, true); }

Skolemized skolemize(TermRef nnf, TermManager& tm) {
  Skolemizer s(tm);
  TermRef out = s.run(nnf, false);
  return {out, s.unsupported};
}

GroundClauseSet instantiate_quantifiers(const std::vector<TermRef>& formulas, TermManager& tm, int rounds,
                                        int cap) {
  GroundClauseSet out;
  Skolemized sk = skolemize(to_nnf(tm.mk_and(formulas), tm), tm);
  if (sk.unsupported) {
    out.unsupported = true;
    return out;
  }
  Instantiator inst(tm, cap);
  inst.add(sk.formula);
  for (int r = 0; r < rounds && !inst.quants.empty() && !inst.limit_hit; ++r) inst.round();
  out.clauses = inst.ground;
  out.instances = inst.instances;
  out.limit_hit = inst.limit_hit;
  return out;
}

Verdict check_sat(const std::vector<TermRef>& formulas, TermManager& tm, const ProverConfig& cfg) {
  const auto deadline = Clock::now() + cfg.timeout;
  Skolemized sk = skolemize(to_nnf(tm.mk_and(formulas), tm), tm);
  if (sk.unsupported) return Verdict::unknown(reason::kUnsupported);
  Instantiator inst(tm, cfg.instance_cap);
  inst.add(sk.formula);
  for (int r = 0; r < cfg.rounds && !inst.quants.empty() && !inst.limit_hit; ++r) {
    if (Clock::now() > deadline) return Verdict::unknown(reason::kTimeout);
    inst.round();
  }
  logic::TermSet lemma_set;
  int function_rounds = 0;
  // Once a model needed function repair, later models are searched inside a
  // box on the free constants first, widening it whenever it is empty. Small
  // models keep the chain of unfoldings short.
  static constexpr std::int64_t kBoxes[] = {8, 64, 512};
  std::size_t box = 0;
  bool boxed = false;
  for (int round = 0;; ++round) {
    std::vector<TermRef> query = inst.ground;
    if (boxed) {
      logic::TermSet consts;
      for (TermRef c : inst.ground)
        for (TermRef k : logic::free_consts(c))
          if (k->sort == Sort::Int || k->sort == Sort::Ref) consts.insert(k);
      std::vector<TermRef> sorted(consts.begin(), consts.end());
      std::sort(sorted.begin(), sorted.end(), [](TermRef a, TermRef b) { return a->name < b->name; });
      for (TermRef k : sorted) {
        query.push_back(tm.mk_le(tm.mk_int(-kBoxes[box]), k));
        query.push_back(tm.mk_le(k, tm.mk_int(kBoxes[box])));
      }
    }
    GroundOptions go;
    go.deadline = deadline;
    go.minimize = cfg.minimize;
    GroundResult g = decide_ground(query, tm, go);
    Verdict v;
    v.ground_core = query;
    v.instances = inst.instances;
    if (g.status == GroundResult::Status::Unsat) {
      if (boxed) {
        if (++box == std::size(kBoxes)) boxed = false;
        --round;
        continue;
      }
      v.kind = Verdict::Kind::Proved;
      return v;
    }
    if (g.status == GroundResult::Status::Unknown) {
      v.kind = Verdict::Kind::Unknown;
      v.reason = g.reason;
      return v;
    }
    int added = round < cfg.model_rounds ? model_based_instances(inst, g.model, tm) : -1;
    if (added == 0 && !inst.limit_hit && cfg.functions) {
      int lemmas = function_lemmas(inst.ground, lemma_set, g.model, tm, *cfg.functions);
      if (lemmas > 0) {
        if (++function_rounds > cfg.function_rounds) {
          v.kind = Verdict::Kind::Unknown;
          v.reason = reason::kInstantiationLimit;
          return v;
        }
        if (function_rounds == 1) boxed = true;
        --round;
        continue;
      }
    }
    if (added == 0 && !inst.limit_hit) {
      v.kind = Verdict::Kind::Counterexample;
      v.model = std::move(g.model);
      return v;
    }
    if (added <= 0) {
      v.kind = Verdict::Kind::Unknown;
      v.reason = reason::kInstantiationLimit;
      return v;
    }
  }
}

Verdict prove(const vcgen::VerificationCondition& vc, TermManager& tm, const ProverConfig& cfg) {
  std::vector<TermRef> fs = vc.prelude;
  fs.push_back(tm.mk_not(vc.goal));
  return check_sat(fs, tm, cfg);
}

}  // namespace minidafny::prover
