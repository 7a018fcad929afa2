#pragma once

#include <map>
#include <string>
#include <vector>

#include "minidafny/frontend/ast.hpp"
#include "minidafny/logic/term.hpp"
#include "minidafny/typecheck/checker.hpp"

namespace minidafny::ir {

using logic::Sort;
using logic::TermManager;
using logic::TermRef;

inline constexpr const char* kHeapInt = "$heap";
inline constexpr const char* kHeapBool = "$heapb";

logic::Sort sort_of(const Type& t);

/// Logical view of a function declaration. `params` are Consts named after
/// the source parameters, followed by the heap Consts the body reads. Bound
/// variables inside the stored terms must be refreshed before each use.
struct FunctionDef {
  std::string name;
  Sort result = Sort::Int;
  bool nat_result = false;
  std::vector<TermRef> params;
  std::size_t user_arity = 0;
  std::vector<TermRef> requires_;
  TermRef body = nullptr;
  std::vector<TermRef> ensures;
};

/// Expression → term translation. Program variables become Consts named after
/// the variable; bound variables become fresh `name!N` Consts; function calls
/// become Apply terms whose trailing arguments are the heaps the function
/// reads.
class Translator {
 public:
  Translator(TermManager& tm, const typecheck::TypedProgram& tp);

  TermManager& tm() { return tm_; }

  TermRef heap(Type::Kind elem);
  TermRef var(const std::string& name, const Type& type);
  TermRef term(const frontend::Expr& e);

  /// Heap kinds read by function `qualified` (element kinds of its reads).
  std::vector<Type::Kind> heaps_read(const std::string& qualified) const;

  /// Binds a source-level bound variable to a term while translating (used by
  /// well-formedness checks that walk quantifier bodies).
  void bind(const std::string& name, TermRef t) { bound_[name].push_back(t); }
  void unbind(const std::string& name) {
    auto it = bound_.find(name);
    it->second.pop_back();
    if (it->second.empty()) bound_.erase(it);
  }

  const FunctionDef& function(const std::string& qualified);
  const std::map<std::string, FunctionDef>& functions();

 private:
  TermManager& tm_;
  const typecheck::TypedProgram& tp_;
  std::map<std::string, std::vector<TermRef>> bound_;
  std::map<std::string, FunctionDef> defs_;
  bool all_defined_ = false;
};

}  // namespace minidafny::ir
