#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace minidafny::logic {

/// Refs are array references; `null` is a distinguished Ref. Heaps map
/// (Ref, Int) to Int or Bool element values. Array lengths are immutable and
/// read with the Length operator.
enum class Sort { Bool, Int, Ref, HeapInt, HeapBool };

std::string_view to_string(Sort s);

enum class Op {
  BoolLit, IntLit, Null, Const,
  Not, And, Or, Implies, Iff, Ite,
  Eq, Lt, Le,
  Add, Sub, Mul, Neg, Div, Mod,
  Select, Store, Length, Apply,
  Forall, Exists,
};

struct Term;
using TermRef = const Term*;

/// Hash-consed, immutable term. Two structurally equal terms built by the same
/// TermManager are the same pointer. `id` reflects creation order and is the
/// only ordering used for deterministic iteration.
struct Term {
  Op op;
  Sort sort;
  std::int64_t value = 0;  // IntLit value; BoolLit 0/1
  std::string name;        // Const symbol; Apply function name
  std::vector<TermRef> args;
  std::uint32_t id = 0;
  std::size_t hash = 0;

  bool is(Op o) const { return op == o; }
  bool is_true() const { return op == Op::BoolLit && value != 0; }
  bool is_false() const { return op == Op::BoolLit && value == 0; }
  bool is_quantifier() const { return op == Op::Forall || op == Op::Exists; }
  /// Quantifiers: args[0] is the bound Const, args[1] the body.
  TermRef bound() const { return args[0]; }
  TermRef body() const { return args[1]; }
};

struct TermIdLess {
  bool operator()(TermRef a, TermRef b) const { return a->id < b->id; }
};
using TermSet = std::set<TermRef, TermIdLess>;
template <class V>
using TermMap = std::map<TermRef, V, TermIdLess>;
using Substitution = std::unordered_map<TermRef, TermRef>;

class TermManager {
 public:
  TermManager();
  TermManager(const TermManager&) = delete;
  TermManager& operator=(const TermManager&) = delete;

  TermRef mk_bool(bool b);
  TermRef mk_true() { return true_; }
  TermRef mk_false() { return false_; }
  TermRef mk_int(std::int64_t v);
  TermRef mk_null();
  TermRef mk_const(const std::string& name, Sort sort);

  TermRef mk_not(TermRef a);
  TermRef mk_and(std::vector<TermRef> args);
  TermRef mk_and(TermRef a, TermRef b) { return mk_and(std::vector<TermRef>{a, b}); }
  TermRef mk_or(std::vector<TermRef> args);
  TermRef mk_or(TermRef a, TermRef b) { return mk_or(std::vector<TermRef>{a, b}); }
  TermRef mk_implies(TermRef a, TermRef b);
  TermRef mk_iff(TermRef a, TermRef b);
  TermRef mk_ite(TermRef c, TermRef t, TermRef e);

  TermRef mk_eq(TermRef a, TermRef b);
  TermRef mk_ne(TermRef a, TermRef b) { return mk_not(mk_eq(a, b)); }
  TermRef mk_lt(TermRef a, TermRef b);
  TermRef mk_le(TermRef a, TermRef b);
  TermRef mk_gt(TermRef a, TermRef b) { return mk_lt(b, a); }
  TermRef mk_ge(TermRef a, TermRef b) { return mk_le(b, a); }

  TermRef mk_add(TermRef a, TermRef b);
  TermRef mk_sub(TermRef a, TermRef b);
  TermRef mk_mul(TermRef a, TermRef b);
  TermRef mk_neg(TermRef a);
  TermRef mk_div(TermRef a, TermRef b);
  TermRef mk_mod(TermRef a, TermRef b);

  TermRef mk_select(TermRef heap, TermRef ref, TermRef index);
  TermRef mk_store(TermRef heap, TermRef ref, TermRef index, TermRef value);
  TermRef mk_length(TermRef ref);
  TermRef mk_apply(const std::string& fn, Sort result, std::vector<TermRef> args);

  TermRef mk_forall(TermRef var, TermRef body);
  TermRef mk_exists(TermRef var, TermRef body);

  /// Rebuilds `t` with new arguments, re-applying the constructor folds.
  TermRef rebuild(TermRef t, std::vector<TermRef> args);

  /// Simultaneous replacement of terms (usually Consts). Bound variables are
  /// assumed uniquely named, so no capture avoidance is performed.
  TermRef substitute(TermRef t, const Substitution& sub);

  /// Renames every bound variable of `t` to a fresh name.
  TermRef refresh_bound(TermRef t);

  /// `base!N` with N unique within this manager.
  std::string fresh_name(const std::string& base);

  std::size_t size() const { return terms_.size(); }

 private:
  TermRef intern(Term t);

  struct Hash {
    std::size_t operator()(const Term* t) const { return t->hash; }
  };
  struct Eq {
    bool operator()(const Term* a, const Term* b) const;
  };

  std::deque<Term> terms_;
  std::unordered_set<const Term*, Hash, Eq> table_;
  TermRef true_ = nullptr;
  TermRef false_ = nullptr;
  std::uint64_t fresh_counter_ = 0;
};

/// Consts occurring free in `t`.
TermSet free_consts(TermRef t);

/// All subterms (including `t`) satisfying `pred`, in first-visit order.
template <class Pred>
std::vector<TermRef> collect(TermRef t, Pred pred);

/// True when `t` contains a quantifier.
bool has_quantifier(TermRef t);

/// Readable infix rendering (used by --emit-vc and diagnostics).
std::string to_string(TermRef t);

template <class Pred>
std::vector<TermRef> collect(TermRef t, Pred pred) {
  std::vector<TermRef> out;
  std::unordered_set<TermRef> seen;
  std::vector<TermRef> stack{t};
  while (!stack.empty()) {
    TermRef u = stack.back();
    stack.pop_back();
    if (!seen.insert(u).second) continue;
    if (pred(u)) out.push_back(u);
    for (auto it = u->args.rbegin(); it != u->args.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

}  // namespace minidafny::logic
