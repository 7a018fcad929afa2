#include <functional>
#include <set>

#include "minidafny/typecheck/checker.hpp"

namespace minidafny::typecheck {

using namespace frontend;

namespace {

class GhostChecker {
 public:
  explicit GhostChecker(const TypedProgram& tp) : tp_(tp) {}

  std::vector<Diagnostic> run() {
    for_each_decl(
        tp_.program(), [&](const MethodDecl& m) { check_method(m); },
        [&](const FunctionDecl& f) {
          if (f.is_function_method) compiled(*f.body, "function method body");
        });
    return std::move(diags_);
  }

 private:
  // Reports every ghost entity used inside `e`, which sits in a compiled
  // position.
  void compiled(const Expr& e, const char* where) {
    for_each_subexpr(e, [&](const Expr& sub) {
      if (const auto* c = sub.as<Call>()) {
        const FunctionDecl* f = tp_.function(c->resolved);
        if (f && !f->is_function_method)
          diags_.push_back({sub.span, Severity::Error, codes::kGhostInCompiled,
                            "ghost function '" + c->callee + "' cannot be used in a " + where +
                                "; declare it as a 'function method'"});
      } else if (const auto* v = sub.as<VarRef>()) {
        if (v->ghost)
          diags_.push_back({sub.span, Severity::Error, codes::kGhostInCompiled,
                            "ghost variable '" + v->name + "' cannot be used in a " + where});
      }
    });
  }

  void check_method(const MethodDecl& m) {
    ghost_locals_.clear();
    for_each_stmt(m.body, [&](const Stmt& s) {
      std::visit(
          [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, VarDecl>) {
              if (n.ghost) ghost_locals_.insert(n.name);
              else if (n.init) compiled(*n.init, "non-ghost initializer");
            } else if constexpr (std::is_same_v<T, Assign>) {
              if (ghost_locals_.count(n.target)) return;
              compiled(*n.rhs, "non-ghost assignment");
              if (n.index) compiled(*n.index, "non-ghost assignment");
            } else if constexpr (std::is_same_v<T, MultiAssignCall>) {
              if (n.ghost) {
                for (const auto& l : n.lhs) ghost_locals_.insert(l);
                return;
              }
              for (const auto& a : n.args) compiled(*a, "method call argument");
            } else if constexpr (std::is_same_v<T, If>) {
              compiled(*n.cond, "non-ghost if condition");
            } else if constexpr (std::is_same_v<T, While>) {
              compiled(*n.guard, "loop guard");
            }
          },
          s.node);
    });
  }

  const TypedProgram& tp_;
  std::set<std::string> ghost_locals_;
  std::vector<Diagnostic> diags_;
};

const std::string* simple_var(const Expr& e) {
  const auto* v = e.as<VarRef>();
  return v ? &v->name : nullptr;
}

bool listed(const std::vector<Ident>& ids, const std::string& name) {
  for (const auto& id : ids)
    if (id.name == name) return true;
  return false;
}

/// Index of the parameter called `name`, or -1.
int param_index(const std::vector<Param>& ps, const std::string& name) {
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (ps[i].name == name) return static_cast<int>(i);
  return -1;
}

}  // namespace

std::vector<Diagnostic> check_ghost_usage(const TypedProgram& tp) {
  return GhostChecker(tp).run();
}

std::vector<Diagnostic> check_frames(const TypedProgram& tp) {
  std::vector<Diagnostic> diags;
  auto report = [&](const Span& s, const char* code, std::string msg) {
    diags.push_back({s, Severity::Error, code, std::move(msg)});
  };

  auto check_function = [&](const FunctionDecl& f) {
    for_each_subexpr(*f.body, [&](const Expr& e) {
      const Expr* target = nullptr;
      if (const auto* sel = e.as<ArraySelect>()) target = sel->array.get();
      if (const auto* len = e.as<Length>()) target = len->array.get();
      if (target) {
        const std::string* name = simple_var(*target);
        if (!name || !listed(f.reads, *name))
          report(e.span, codes::kReadsViolation,
                 "insufficient reads clause to read array element");
        return;
      }
      if (const auto* c = e.as<Call>()) {
        const FunctionDecl* callee = tp.function(c->resolved);
        if (!callee) return;
        for (const auto& r : callee->reads) {
          int k = param_index(callee->ins, r.name);
          if (k < 0 || k >= static_cast<int>(c->args.size())) continue;
          const std::string* name = simple_var(*c->args[k]);
          if (!name || !listed(f.reads, *name))
            report(e.span, codes::kReadsViolation,
                   "insufficient reads clause to invoke function '" + c->callee + "'");
        }
      }
    });
  };

  auto check_method = [&](const MethodDecl& m) {
    for_each_stmt(m.body, [&](const Stmt& s) {
      if (const auto* a = s.as<Assign>(); a && a->index) {
        if (!listed(m.modifies, a->target))
          report(a->target_span, codes::kModifiesViolation,
                 "assignment may update an array element not in the enclosing method's modifies "
                 "clause ('" + a->target + "')");
      } else if (const auto* c = s.as<MultiAssignCall>()) {
        const MethodDecl* callee = tp.method(c->resolved);
        if (!callee) return;
        for (const auto& mod : callee->modifies) {
          int k = param_index(callee->ins, mod.name);
          if (k < 0 || k >= static_cast<int>(c->args.size())) continue;
          const std::string* name = simple_var(*c->args[k]);
          if (!name || !listed(m.modifies, *name))
            report(c->args[k]->span, codes::kCallFrameViolation,
                   "call may modify '" + (name ? *name : std::string("an array")) +
                       "', which is not in the caller's modifies clause");
        }
      }
    });
  };

  for_each_decl(tp.program(), check_method, check_function);
  return diags;
}

}  // namespace minidafny::typecheck
