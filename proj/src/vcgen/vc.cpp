#include "minidafny/vcgen/vc.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace minidafny::vcgen {

using ir::Command;
using logic::Op;
using logic::Sort;
using logic::Substitution;
using logic::TermSet;

TermRef VerificationCondition::formula(TermManager& tm) const {
  return tm.mk_implies(tm.mk_and(prelude), goal);
}

namespace {

TermRef wp_command(const Command& c, TermRef q, TermManager& tm) {
  switch (c.kind) {
    case Command::Kind::Assume:
      return tm.mk_implies(c.formula, q);
    case Command::Kind::Assert:
      return q;  // non-target asserts are followed by an Assume of the same formula
    case Command::Kind::Assign:
      return tm.substitute(q, {{c.target, c.value}});
    case Command::Kind::HeapStore:
      return tm.substitute(q, {{c.target, tm.mk_store(c.target, c.ref, c.index, c.value)}});
    case Command::Kind::Havoc: {
      Substitution sub;
      for (const auto& [v, fresh] : c.havoc)
        if (v != fresh) sub[v] = fresh;
      TermRef body = tm.substitute(q, sub);
      std::vector<TermRef> frames;
      for (const auto& [v, fresh] : c.havoc) {
        if (v->sort != Sort::HeapInt && v->sort != Sort::HeapBool) continue;
        TermRef r = tm.mk_const(tm.fresh_name("r"), Sort::Ref);
        TermRef j = tm.mk_const(tm.fresh_name("j"), Sort::Int);
        std::vector<TermRef> outside;
        for (TermRef f : c.frame) outside.push_back(tm.mk_ne(r, f));
        TermRef same = tm.mk_eq(tm.mk_select(fresh, r, j), tm.mk_select(v, r, j));
        frames.push_back(tm.mk_forall(r, tm.mk_forall(j, tm.mk_implies(tm.mk_and(outside), same))));
      }
      body = tm.mk_implies(tm.mk_and(frames), body);
      for (auto it = c.havoc.rbegin(); it != c.havoc.rend(); ++it)
        body = tm.mk_forall(it->second, body);
      return body;
    }
  }
  return q;
}

}  // namespace

std::vector<VerificationCondition> compute_wp(const ir::Graph& g, TermManager& tm) {
  std::vector<VerificationCondition> out;
  auto order = ir::topological_order(g);
  if (!order) throw std::logic_error("guarded-command graph of '" + g.name + "' has a cycle");
  const int n = static_cast<int>(g.blocks.size());
  std::vector<std::vector<int>> preds(n);
  for (int b = 0; b < n; ++b)
    for (int s : g.blocks[b].succs) preds[s].push_back(b);

  for (int tb : *order) {
    const auto& block = g.blocks[tb];
    for (std::size_t ti = 0; ti < block.cmds.size(); ++ti) {
      const Command& target = block.cmds[ti];
      if (target.kind != Command::Kind::Assert) continue;

      // Blocks from which the target is reachable.
      std::vector<char> reaches(n, 0);
      std::vector<int> work{tb};
      reaches[tb] = 1;
      while (!work.empty()) {
        int b = work.back();
        work.pop_back();
        for (int p : preds[b])
          if (!reaches[p]) reaches[p] = 1, work.push_back(p);
      }

      std::vector<TermRef> wp(n, nullptr);
      for (auto it = order->rbegin(); it != order->rend(); ++it) {
        int b = *it;
        if (!reaches[b]) continue;
        TermRef q;
        std::size_t end;
        if (b == tb) {
          q = target.formula;
          end = ti;
        } else {
          std::vector<TermRef> parts;
          for (int s : g.blocks[b].succs)
            if (reaches[s]) parts.push_back(wp[s]);
          q = tm.mk_and(parts);
          end = g.blocks[b].cmds.size();
        }
        for (std::size_t k = end; k-- > 0;) q = wp_command(g.blocks[b].cmds[k], q, tm);
        wp[b] = q;
      }
      if (!reaches[0]) continue;  // unreachable assert

      VerificationCondition vc;
      vc.method = g.name;
      vc.kind = target.obligation;
      vc.span = target.span;
      vc.description = target.description;
      vc.goal = wp[0];
      out.push_back(std::move(vc));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.span.start_line != b.span.start_line) return a.span.start_line < b.span.start_line;
    if (a.span.start_col != b.span.start_col) return a.span.start_col < b.span.start_col;
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = "vc" + std::to_string(i + 1);
  return out;
}

namespace {

class Inliner {
 public:
  Inliner(const std::map<std::string, ir::FunctionDef>& defs, TermManager& tm, std::string self)
      : defs_(defs), tm_(tm), self_(std::move(self)) {}

  TermRef rewrite(TermRef f, int fuel, bool positive, const TermSet& defined) {
    switch (f->op) {
      case Op::And:
      case Op::Or: {
        std::vector<TermRef> a;
        for (TermRef c : f->args) a.push_back(rewrite(c, fuel, positive, defined));
        return tm_.rebuild(f, std::move(a));
      }
      case Op::Not:
        return tm_.mk_not(rewrite(f->args[0], fuel, !positive, defined));
      case Op::Implies:
        return tm_.mk_implies(rewrite(f->args[0], fuel, !positive, defined),
                              rewrite(f->args[1], fuel, positive, defined));
      case Op::Iff:
        if (!has_apply(f)) return f;
        return rewrite(tm_.mk_and(tm_.mk_implies(f->args[0], f->args[1]),
                                  tm_.mk_implies(f->args[1], f->args[0])),
                       fuel, positive, defined);
      case Op::Ite:
        if (f->sort != Sort::Bool) break;
        if (!has_apply(f)) return f;
        return rewrite(tm_.mk_and(tm_.mk_implies(f->args[0], f->args[1]),
                                  tm_.mk_implies(tm_.mk_not(f->args[0]), f->args[2])),
                       fuel, positive, defined);
      case Op::Forall:
      case Op::Exists:
        return tm_.rebuild(f, {f->bound(), rewrite(f->body(), fuel, positive, defined)});
      default:
        break;
    }
    // Atom.
    std::vector<TermRef> apps =
        logic::collect(f, [&](TermRef u) { return u->op == Op::Apply && !defined.count(u); });
    if (apps.empty()) return f;
    std::vector<TermRef> facts;
    for (TermRef app : apps) facts.push_back(fact(app, fuel, defined));
    TermRef all = tm_.mk_and(facts);
    return positive ? tm_.mk_implies(all, f) : tm_.mk_and(all, f);
  }

 private:
  bool has_apply(TermRef f) {
    return !logic::collect(f, [](TermRef u) { return u->op == Op::Apply; }).empty();
  }

  TermRef fact(TermRef app, int fuel, const TermSet& defined) {
    auto it = defs_.find(app->name);
    if (it == defs_.end()) return tm_.mk_true();
    const ir::FunctionDef& d = it->second;
    Substitution sub;
    for (std::size_t i = 0; i < d.params.size() && i < app->args.size(); ++i)
      sub[d.params[i]] = app->args[i];
    auto inst = [&](TermRef t) { return tm_.refresh_bound(tm_.substitute(t, sub)); };

    std::vector<TermRef> pre, parts;
    for (TermRef r : d.requires_) pre.push_back(inst(r));
    if (fuel > 0) parts.push_back(tm_.mk_eq(app, inst(d.body)));
    if (d.name != self_)
      for (TermRef e : d.ensures) parts.push_back(inst(e));
    if (d.nat_result) parts.push_back(tm_.mk_ge(app, tm_.mk_int(0)));
    TermRef f = tm_.mk_implies(tm_.mk_and(pre), tm_.mk_and(parts));
    if (fuel <= 0) return f;
    TermSet inner = defined;
    inner.insert(app);
    return rewrite(f, fuel - 1, false, inner);
  }

  const std::map<std::string, ir::FunctionDef>& defs_;
  TermManager& tm_;
  std::string self_;
};

}  // namespace

TermRef inline_functions(TermRef f, int fuel, const std::map<std::string, ir::FunctionDef>& defs,
                         TermManager& tm, const std::string& self) {
  return Inliner(defs, tm, self).rewrite(f, fuel, true, {});
}

std::vector<VerificationCondition> generate(const ir::Graph& g, ir::Translator& tr,
                                            const VcOptions& opts) {
  TermManager& tm = tr.tm();
  auto vcs = compute_wp(g, tm);
  const auto& defs = tr.functions();
  for (auto& vc : vcs) {
    vc.goal = inline_functions(vc.goal, opts.fuel, defs, tm, g.is_function ? g.name : "");
    TermSet free = logic::free_consts(vc.goal);
    for (TermRef c : free) {
      auto it = g.var_types.find(c->name);
      if (it != g.var_types.end() && it->second.kind == Type::Kind::Nat)
        vc.prelude.push_back(tm.mk_ge(c, tm.mk_int(0)));
    }
    TermSet lengths;
    for (TermRef l : logic::collect(vc.goal, [](TermRef u) { return u->op == Op::Length; })) {
      TermSet fc = logic::free_consts(l);
      if (std::all_of(fc.begin(), fc.end(), [&](TermRef c) { return free.count(c) > 0; }))
        lengths.insert(l);
    }
    for (TermRef l : lengths) vc.prelude.push_back(tm.mk_ge(l, tm.mk_int(0)));
  }
  return vcs;
}

std::vector<VerificationCondition> check_function_termination(
    const std::string& decl, const typecheck::TypedProgram& tp, ir::Translator& tr,
    const ir::CallGraph& cg, std::vector<Diagnostic>& diags, const VcOptions& opts) {
  ir::Graph g;
  std::vector<Diagnostic> lowering_diags;
  if (const auto* m = tp.method(decl)) g = ir::lower_method(*m, tr, cg, tp, lowering_diags);
  else if (const auto* f = tp.function(decl)) g = ir::lower_function(*f, tr, cg, tp, lowering_diags);
  else return {};
  for (auto& d : lowering_diags)
    if (d.message.rfind("recursive declaration", 0) == 0) diags.push_back(d);
  std::vector<VerificationCondition> out;
  for (auto& vc : generate(g, tr, opts)) {
    bool term = vc.kind == ir::ObligationKind::TerminationDecreases ||
                vc.kind == ir::ObligationKind::TerminationBounded;
    if (term && vc.description.find("recursive call") != std::string::npos)
      out.push_back(std::move(vc));
  }
  return out;
}

std::string dump(const VerificationCondition& vc) {
  std::ostringstream os;
  os << vc.id << ' ' << vc.method << ' ' << ir::kind_name(vc.kind) << ' ' << vc.span.start_line
     << ':' << vc.span.start_col << " \"" << vc.description << "\"\n";
  for (TermRef p : vc.prelude) os << "  prelude: " << logic::to_string(p) << '\n';
  os << "  goal: " << logic::to_string(vc.goal) << '\n';
  return os.str();
}

}  // namespace minidafny::vcgen
