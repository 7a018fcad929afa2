#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "minidafny/diagnostic.hpp"
#include "minidafny/logic/term.hpp"
#include "minidafny/types.hpp"

namespace minidafny::ir {

using logic::TermRef;

enum class ObligationKind {
  Postcondition,
  PreconditionAtCall,
  AssertStmt,
  LoopInvEntry,
  LoopInvMaintained,
  TerminationDecreases,
  TerminationBounded,
  IndexInBounds,
  NullDeref,
  DivByZero,
  NatNonNegative,
};

/// `Postcondition`, `AssertStmt`, ...
std::string_view kind_name(ObligationKind k);
/// Diagnostic code: `POSTCONDITION`, `ASSERT`, ...
std::string_view kind_code(ObligationKind k);
std::optional<ObligationKind> kind_from_name(std::string_view name);

struct Command {
  enum class Kind { Assume, Assert, Assign, HeapStore, Havoc };
  Kind kind = Kind::Assume;

  TermRef formula = nullptr;  // Assume, Assert
  ObligationKind obligation = ObligationKind::AssertStmt;  // Assert
  Span span;                                                 // Assert
  std::string description;                                   // Assert

  TermRef target = nullptr;  // Assign: variable Const; HeapStore: heap Const
  TermRef value = nullptr;   // Assign, HeapStore
  TermRef ref = nullptr;     // HeapStore
  TermRef index = nullptr;   // HeapStore

  /// Havoc: (variable, fresh constant) pairs. Fresh constants are named
  /// `<variable>@<site>`.
  std::vector<std::pair<TermRef, TermRef>> havoc;
  /// Havoc of a heap: only elements of these references may change.
  std::vector<TermRef> frame;

  static Command assume(TermRef f);
  static Command assert_(TermRef f, ObligationKind k, Span span, std::string description);
  static Command assign(TermRef var, TermRef value);
  static Command heap_store(TermRef heap, TermRef ref, TermRef index, TermRef value);
};

struct Block {
  std::string label;
  std::vector<Command> cmds;
  std::vector<int> succs;  // indices into Graph::blocks
};

/// Acyclic block graph of one method or function. blocks[0] is the entry.
struct Graph {
  std::string name;  // qualified declaration name
  bool is_function = false;
  std::vector<Block> blocks;
  /// Source type of every program variable (in/out params and locals).
  std::map<std::string, Type> var_types;
  std::vector<std::string> ins;
  std::vector<std::string> outs;
};

/// Block indices in topological order; std::nullopt if the graph has a cycle.
std::optional<std::vector<int>> topological_order(const Graph& g);

std::string to_string(const Command& c);

/// Stable text dump: a header line `graph <name>` then one line per block,
/// `label: cmd; cmd; ... -> succ, succ` (`-> end` for exit blocks).
std::string dump(const Graph& g);

}  // namespace minidafny::ir
