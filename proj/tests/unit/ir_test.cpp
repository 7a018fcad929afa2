#include <gtest/gtest.h>

#include <functional>
#include <set>

#include "minidafny/frontend/parser.hpp"
#include "minidafny/frontend/printer.hpp"
#include "minidafny/ir/lower.hpp"
#include "session.hpp"

namespace minidafny::ir {
namespace {

using logic::Op;
using logic::TermRef;
using testing::corpus_file;
using testing::Session;

const char* kAppendix = "EdinburghCastleVisitorCenter.";

std::string q(const std::string& name) { return kAppendix + name; }

std::vector<const Command*> asserts_of(const Graph& g, ObligationKind k) {
  std::vector<const Command*> out;
  for (const auto& b : g.blocks)
    for (const auto& c : b.cmds)
      if (c.kind == Command::Kind::Assert && c.obligation == k) out.push_back(&c);
  return out;
}

const frontend::While* first_loop(const frontend::MethodDecl& m) {
  const frontend::While* loop = nullptr;
  frontend::for_each_stmt(m.body, [&](const frontend::Stmt& s) {
    if (!loop) loop = s.as<frontend::While>();
  });
  return loop;
}

// The guess needs operand types, so the guard goes through the checker.
std::optional<std::string> guess(const std::string& guard) {
  Session s("method M(a: int, b: int, flag: bool) { while " + guard + " { } }");
  EXPECT_TRUE(s.typed());
  auto d = guess_decreases(*first_loop(*s.tp().method("M")));
  if (!d) return std::nullopt;
  return frontend::to_source(**d);
}

TEST(GuessDecreases, Rules) {
  EXPECT_EQ(guess("(a < b)"), "b - a");
  EXPECT_EQ(guess("a <= b"), "b - a");
  EXPECT_EQ(guess("a > 0"), "a - 0");
  EXPECT_EQ(guess("a >= b"), "a - b");
  EXPECT_EQ(guess("a != b"), std::nullopt);
  EXPECT_EQ(guess("flag"), std::nullopt);
  EXPECT_EQ(guess("a < b && flag"), std::nullopt);
}

TEST(GuessDecreases, AudioGuidesLoop) {
  Session s(corpus_file("audio_guides_no_decreases.mdfy"));
  ASSERT_TRUE(s.typed());
  const auto* loop = first_loop(*s.tp().method(q("AssignAudioGuides")));
  ASSERT_NE(loop, nullptr);
  ASSERT_EQ(loop->decreases, nullptr);
  auto d = guess_decreases(*loop);
  ASSERT_TRUE(d);
  EXPECT_EQ(frontend::to_source(**d), "numPeople - numAssignedGuides");
}

TEST(GuessDecreases, NoMeasureDiagnostic) {
  Session s("method M(flag: bool) { var f := flag; while f { f := false; } }");
  ASSERT_TRUE(s.typed());
  auto codes = testing::codes_of(s.diagnostics());
  ASSERT_EQ(codes, std::vector<std::string>{codes::kNoTermination});
  EXPECT_EQ(s.diagnostics()[0].message, kNoMeasureMessage);
}

TEST(Lower, GoldenAppendixDump) {
  Session s(corpus_file("appendix.mdfy"), "appendix.mdfy");
  std::string text;
  for (const auto& g : s.graphs()) text += dump(g);
  EXPECT_EQ(text, testing::read_file(std::string(MINIDAFNY_GOLDEN_DIR) + "/appendix.gc"));
}

TEST(Lower, AssertThenAssume) {
  Session s("method M(x: int) { assert x > 1; }");
  const auto& g = s.graph("M");
  const auto& cmds = g.blocks[0].cmds;
  ASSERT_EQ(cmds.size(), 2u);
  EXPECT_EQ(cmds[0].kind, Command::Kind::Assert);
  EXPECT_EQ(cmds[0].obligation, ObligationKind::AssertStmt);
  EXPECT_EQ(cmds[1].kind, Command::Kind::Assume);
  EXPECT_EQ(cmds[0].formula, cmds[1].formula);
}

TEST(Lower, MethodCallForgetsBody) {
  Session s(corpus_file("appendix.mdfy"));
  const auto& g = s.graph(q("FamilyTicketVerification"));
  std::vector<std::string> seq;
  for (const auto& c : g.blocks[0].cmds) seq.push_back(to_string(c));
  auto at = [&](const std::string& text) {
    return std::find(seq.begin(), seq.end(), text) - seq.begin();
  };
  auto pre = at("assert[PreconditionAtCall 26:3] 1 <= numAdults@6");
  auto hv = at("havoc totalFee@6 -> totalFee@6");
  auto post = at("assume 0 < totalFee@6");
  ASSERT_LT(pre, static_cast<long>(seq.size()));
  ASSERT_LT(hv, static_cast<long>(seq.size()));
  ASSERT_LT(post, static_cast<long>(seq.size()));
  EXPECT_LT(pre, hv);
  EXPECT_LT(hv, post);
  // Nothing of the callee body (10 * ..., 6 * ...) reaches the caller.
  for (const auto& line : seq) EXPECT_EQ(line.find("adultFee"), std::string::npos) << line;
}

TEST(Lower, LoopInvariantEntryAndMaintenance) {
  Session s(corpus_file("appendix.mdfy"));
  const auto& g = s.graph(q("AssignAudioGuides"));
  auto entry = asserts_of(g, ObligationKind::LoopInvEntry);
  auto kept = asserts_of(g, ObligationKind::LoopInvMaintained);
  ASSERT_EQ(entry.size(), 1u);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(logic::to_string(entry[0]->formula), "numAssignedGuides <= numPeople");
  EXPECT_EQ(logic::to_string(kept[0]->formula), "numAssignedGuides <= numPeople");
  EXPECT_EQ(entry[0]->span.start_line, 45);
}

TEST(Lower, TerminationChecksUseSnapshot) {
  Session s(corpus_file("appendix.mdfy"));
  const auto& g = s.graph(q("AssignAudioGuides"));
  auto dec = asserts_of(g, ObligationKind::TerminationDecreases);
  auto bnd = asserts_of(g, ObligationKind::TerminationBounded);
  ASSERT_EQ(dec.size(), 1u);
  ASSERT_EQ(bnd.size(), 1u);
  EXPECT_EQ(logic::to_string(dec[0]->formula), "numPeople - numAssignedGuides < $decr13");
  // Bounded is about the measure's value at the start of the iteration.
  EXPECT_EQ(logic::to_string(bnd[0]->formula), "0 <= $decr13");
}

TEST(Lower, GuessedMeasureMatchesExplicitOne) {
  Session with(corpus_file("appendix.mdfy"));
  Session without(corpus_file("audio_guides_no_decreases.mdfy"));
  auto a = asserts_of(with.graph(q("AssignAudioGuides")), ObligationKind::TerminationDecreases);
  auto b = asserts_of(without.graph(q("AssignAudioGuides")), ObligationKind::TerminationDecreases);
  ASSERT_EQ(a.size(), 1u);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(logic::to_string(a[0]->formula), logic::to_string(b[0]->formula));
}

TEST(Lower, DecreasesSnapshotsAreFreshPerLoop) {
  Session s(
      "method M(n: nat) { var i := 0; while i < n { i := i + 1; } var j := 0; while j < n { j := j + 1; } }");
  std::set<std::string> names;
  for (const auto& b : s.graph("M").blocks)
    for (const auto& c : b.cmds)
      if (c.kind == Command::Kind::Assign && c.target->name.rfind("$decr", 0) == 0)
        names.insert(c.target->name);
  EXPECT_EQ(names.size(), 2u);
}

TEST(Lower, BreakSkipsInvariantAndGuard) {
  Session s(corpus_file("appendix.mdfy"));
  const auto& g = s.graph(q("VerifyAdults"));
  // Find the block holding `allAdults := false` and walk to the join.
  int brk = -1;
  for (std::size_t k = 0; k < g.blocks.size(); ++k)
    for (const auto& c : g.blocks[k].cmds)
      if (c.kind == Command::Kind::Assign && c.target->name == "allAdults") brk = static_cast<int>(k);
  ASSERT_GE(brk, 0);
  ASSERT_EQ(g.blocks[brk].succs.size(), 1u);
  const auto& join = g.blocks[g.blocks[brk].succs[0]];
  EXPECT_TRUE(join.cmds.empty());
  for (const auto& c : g.blocks[brk].cmds)
    EXPECT_NE(c.obligation, ObligationKind::LoopInvMaintained);
}

TEST(Lower, ObligationSpans) {
  Session s(corpus_file("appendix.mdfy"));
  auto post = asserts_of(s.graph(q("CalculateEdiCastleVisitFee")), ObligationKind::Postcondition);
  ASSERT_EQ(post.size(), 1u);
  EXPECT_EQ(post[0]->span.start_line, 8);
  EXPECT_EQ(post[0]->span.start_col, 11);
}

TEST(Lower, DivisionGetsDivByZero) {
  Session s("method M(a: int, b: int) returns (r: int) requires b != 0 { r := a / b + a % (b + 1); }");
  EXPECT_EQ(asserts_of(s.graph("M"), ObligationKind::DivByZero).size(), 2u);
}

TEST(Lower, NatSlotsGetObligation) {
  Session s("method M(x: int) returns (r: nat) { r := x; }");
  auto nat = asserts_of(s.graph("M"), ObligationKind::NatNonNegative);
  ASSERT_EQ(nat.size(), 1u);
  EXPECT_EQ(logic::to_string(nat[0]->formula), "0 <= x");
}

TEST(Lower, HeapHavocWhenBodyStores) {
  Session s(corpus_file("arrays.mdfy"));
  bool heap_havoc = false;
  for (const auto& b : s.graph("Fill").blocks)
    for (const auto& c : b.cmds)
      if (c.kind == Command::Kind::Havoc)
        for (const auto& [v, fresh] : c.havoc) heap_havoc |= v->name == kHeapInt;
  EXPECT_TRUE(heap_havoc);
}

// ---- structural properties over every corpus graph ----

std::vector<std::string> corpus_files() {
  return {"appendix.mdfy",
          "arith.mdfy",
          "arrays.mdfy",
          "audio_guides_no_decreases.mdfy",
          "audio_guides_no_invariant.mdfy",
          "verify_adults_no_forall_invariant.mdfy",
          "verify_adults_no_index_invariant.mdfy",
          "fee_children_int.mdfy",
          "child_present_no_requires.mdfy"};
}

TEST(GraphProperties, Acyclic) {
  for (const auto& f : corpus_files()) {
    Session s(corpus_file(f));
    for (const auto& g : s.graphs()) {
      auto order = topological_order(g);
      ASSERT_TRUE(order) << g.name;
      EXPECT_EQ(order->size(), g.blocks.size());
      EXPECT_EQ((*order)[0], 0);
    }
  }
}

// Scalars assigned in a loop body (declared outside it) and whether it stores.
struct LoopWrites {
  std::set<std::string> vars;
  bool heap = false;
};

void scan_body(const frontend::Block& b, const typecheck::TypedProgram& tp, LoopWrites& w,
               std::set<std::string>& local) {
  for (const auto& s : b.stmts) {
    if (auto* v = s->as<frontend::VarDecl>()) local.insert(v->name);
    if (auto* a = s->as<frontend::Assign>()) {
      if (a->index) w.heap = true;
      else if (!local.count(a->target)) w.vars.insert(a->target);
    }
    if (auto* c = s->as<frontend::MultiAssignCall>()) {
      for (const auto& n : c->lhs) {
        if (c->declares) local.insert(n);
        else if (!local.count(n)) w.vars.insert(n);
      }
      if (const auto* m = tp.method(c->resolved); m && !m->modifies.empty()) w.heap = true;
    }
    if (auto* i = s->as<frontend::If>()) {
      auto inner = local;
      scan_body(i->then_block, tp, w, inner);
      if (i->else_block) {
        inner = local;
        scan_body(*i->else_block, tp, w, inner);
      }
    }
    if (auto* l = s->as<frontend::While>()) {
      auto inner = local;
      scan_body(l->body, tp, w, inner);
    }
  }
}

TEST(GraphProperties, HavocCoversLoopTargets) {
  std::string nested =
      "method N(n: nat) returns (t: int) { var i := 0; t := 0;\n"
      "  while i < n { var j := 0; while j < n { t := t + 1; j := j + 1; } i := i + 1; } }";
  std::vector<std::string> sources = {nested};
  for (const auto& f : corpus_files()) sources.push_back(corpus_file(f));
  for (const auto& src : sources) {
    Session s(src);
    ASSERT_TRUE(s.typed());
    for (const auto& g : s.graphs()) {
      const auto* m = s.tp().method(g.name);
      if (!m) continue;
      frontend::for_each_stmt(m->body, [&](const frontend::Stmt& st) {
        const auto* loop = st.as<frontend::While>();
        if (!loop) return;
        LoopWrites w;
        std::set<std::string> local;
        scan_body(loop->body, s.tp(), w, local);
        std::set<std::string> havocked;
        std::string suffix = "@" + std::to_string(st.id);
        for (const auto& b : g.blocks)
          for (const auto& c : b.cmds)
            if (c.kind == Command::Kind::Havoc)
              for (const auto& [v, fresh] : c.havoc)
                if (fresh->name.size() > suffix.size() &&
                    fresh->name.compare(fresh->name.size() - suffix.size(), suffix.size(), suffix) == 0)
                  havocked.insert(v->name);
        for (const auto& v : w.vars) EXPECT_TRUE(havocked.count(v)) << g.name << " loop " << st.id << " " << v;
        if (w.heap) EXPECT_TRUE(havocked.count(kHeapInt) || havocked.count(kHeapBool)) << g.name;
      });
    }
  }
}

bool contains(TermRef t, TermRef sub) {
  return !logic::collect(t, [&](TermRef u) { return u == sub; }).empty();
}

bool wf_covered(const std::vector<const Command*>& asserts, TermRef ref, logic::TermManager& tm) {
  bool null_ok = false, idx_ok = false;
  for (const Command* p : asserts) {
    if (p->obligation == ObligationKind::NullDeref && contains(p->formula, tm.mk_eq(ref, tm.mk_null())))
      null_ok = true;
    if (p->obligation == ObligationKind::IndexInBounds &&
        (p->formula->is_true() || contains(p->formula, tm.mk_length(ref))))
      idx_ok = true;
  }
  return null_ok && idx_ok;
}

// Every select, store and division in program code is preceded on every path
// by the matching safety asserts. Loop invariants are the exception: their
// well-formedness is checked once at the loop head, after the havoc, which
// covers the entry state as well; there selects are total, so the entry
// assert is meaningful without a dominating check.
TEST(GraphProperties, SafetyAssertsDominate) {
  std::vector<std::string> sources;
  for (const auto& f : corpus_files()) sources.push_back(corpus_file(f));
  sources.push_back("method D(a: int, b: int) returns (r: int) requires b > 0 { r := a / b; r := r % b; }");
  int checked = 0;
  for (const auto& src : sources) {
    Session s(src);
    for (const auto& g : s.graphs()) {
      std::vector<const Command*> all_wf;
      for (const auto& b : g.blocks)
        for (const auto& c : b.cmds)
          if (c.kind == Command::Kind::Assert && (c.obligation == ObligationKind::NullDeref ||
                                                  c.obligation == ObligationKind::IndexInBounds))
            all_wf.push_back(&c);
      std::function<void(int, std::vector<const Command*>)> walk = [&](int bi,
                                                                       std::vector<const Command*> seen) {
        for (const auto& c : g.blocks[bi].cmds) {
          std::vector<TermRef> roots;
          bool is_wf = c.kind == Command::Kind::Assert &&
                       (c.obligation == ObligationKind::NullDeref ||
                        c.obligation == ObligationKind::IndexInBounds ||
                        c.obligation == ObligationKind::DivByZero);
          if (c.kind == Command::Kind::Assert && !is_wf) roots.push_back(c.formula);
          if (c.kind == Command::Kind::Assign) roots.push_back(c.value);
          if (c.kind == Command::Kind::HeapStore) {
            roots.push_back(c.value);
            roots.push_back(s.tm().mk_select(c.target, c.ref, c.index));
          }
          for (TermRef r : roots) {
            for (TermRef sel : logic::collect(r, [](TermRef u) { return u->op == Op::Select; })) {
              const auto& pool = c.obligation == ObligationKind::LoopInvEntry ? all_wf : seen;
              EXPECT_TRUE(wf_covered(pool, sel->args[1], s.tm())) << g.name << ": " << logic::to_string(sel);
              ++checked;
            }
            for (TermRef d : logic::collect(r, [](TermRef u) { return u->op == Op::Div || u->op == Op::Mod; })) {
              bool ok = d->args[1]->op == Op::IntLit && d->args[1]->value != 0;
              for (const Command* p : seen)
                if (p->obligation == ObligationKind::DivByZero && contains(p->formula, d->args[1])) ok = true;
              EXPECT_TRUE(ok) << g.name << ": " << logic::to_string(d);
              ++checked;
            }
          }
          if (is_wf) seen.push_back(&c);
        }
        for (int n : g.blocks[bi].succs) walk(n, seen);
      };
      walk(0, {});
    }
  }
  EXPECT_GT(checked, 20);
}

}  // namespace
}  // namespace minidafny::ir
