#include "minidafny/ir/gc.hpp"

#include <sstream>

namespace minidafny::ir {

namespace {

struct KindInfo {
  ObligationKind kind;
  const char* name;
  const char* code;
};

constexpr KindInfo kKinds[] = {
    {ObligationKind::Postcondition, "Postcondition", "POSTCONDITION"},
    {ObligationKind::PreconditionAtCall, "PreconditionAtCall", "PRECONDITION"},
    {ObligationKind::AssertStmt, "AssertStmt", "ASSERT"},
    {ObligationKind::LoopInvEntry, "LoopInvEntry", "INVARIANT_ENTRY"},
    {ObligationKind::LoopInvMaintained, "LoopInvMaintained", "INVARIANT_MAINTAINED"},
    {ObligationKind::TerminationDecreases, "TerminationDecreases", "DECREASES"},
    {ObligationKind::TerminationBounded, "TerminationBounded", "BOUNDED"},
    {ObligationKind::IndexInBounds, "IndexInBounds", "INDEX_BOUNDS"},
    {ObligationKind::NullDeref, "NullDeref", "NULL_DEREF"},
    {ObligationKind::DivByZero, "DivByZero", "DIV_BY_ZERO"},
    {ObligationKind::NatNonNegative, "NatNonNegative", "NAT_NEGATIVE"},
};

}  // namespace

std::string_view kind_name(ObligationKind k) {
  for (const auto& i : kKinds)
    if (i.kind == k) return i.name;
  return "?";
}

std::string_view kind_code(ObligationKind k) {
  for (const auto& i : kKinds)
    if (i.kind == k) return i.code;
  return "?";
}

std::optional<ObligationKind> kind_from_name(std::string_view name) {
  for (const auto& i : kKinds)
    if (name == i.name) return i.kind;
  return std::nullopt;
}

Command Command::assume(TermRef f) {
  Command c;
  c.kind = Kind::Assume;
  c.formula = f;
  return c;
}

Command Command::assert_(TermRef f, ObligationKind k, Span span, std::string description) {
  Command c;
  c.kind = Kind::Assert;
  c.formula = f;
  c.obligation = k;
  c.span = std::move(span);
  c.description = std::move(description);
  return c;
}

Command Command::assign(TermRef var, TermRef value) {
  Command c;
  c.kind = Kind::Assign;
  c.target = var;
  c.value = value;
  return c;
}

Command Command::heap_store(TermRef heap, TermRef ref, TermRef index, TermRef value) {
  Command c;
  c.kind = Kind::HeapStore;
  c.target = heap;
  c.ref = ref;
  c.index = index;
  c.value = value;
  return c;
}

std::optional<std::vector<int>> topological_order(const Graph& g) {
  const int n = static_cast<int>(g.blocks.size());
  std::vector<int> indegree(n, 0);
  for (const auto& b : g.blocks)
    for (int s : b.succs) ++indegree[s];
  std::vector<int> ready, order;
  for (int i = n - 1; i >= 0; --i)
    if (indegree[i] == 0) ready.push_back(i);
  while (!ready.empty()) {
    int b = ready.back();
    ready.pop_back();
    order.push_back(b);
    for (int s : g.blocks[b].succs)
      if (--indegree[s] == 0) ready.push_back(s);
  }
  if (static_cast<int>(order.size()) != n) return std::nullopt;
  return order;
}

std::string to_string(const Command& c) {
  using logic::to_string;
  std::ostringstream os;
  switch (c.kind) {
    case Command::Kind::Assume:
      os << "assume " << to_string(c.formula);
      break;
    case Command::Kind::Assert:
      os << "assert[" << kind_name(c.obligation) << ' ' << c.span.start_line << ':'
         << c.span.start_col << "] " << to_string(c.formula);
      break;
    case Command::Kind::Assign:
      os << c.target->name << " := " << to_string(c.value);
      break;
    case Command::Kind::HeapStore:
      os << c.target->name << '[' << to_string(c.ref) << ", " << to_string(c.index)
         << "] := " << to_string(c.value);
      break;
    case Command::Kind::Havoc: {
      os << "havoc ";
      for (std::size_t i = 0; i < c.havoc.size(); ++i)
        os << (i ? ", " : "") << c.havoc[i].first->name << " -> " << c.havoc[i].second->name;
      if (!c.frame.empty()) {
        os << " frame(";
        for (std::size_t i = 0; i < c.frame.size(); ++i)
          os << (i ? ", " : "") << to_string(c.frame[i]);
        os << ')';
      }
      break;
    }
  }
  return os.str();
}

std::string dump(const Graph& g) {
  std::ostringstream os;
  os << "graph " << g.name << '\n';
  for (const auto& b : g.blocks) {
    os << b.label << ':';
    for (std::size_t i = 0; i < b.cmds.size(); ++i)
      os << (i ? "; " : " ") << to_string(b.cmds[i]);
    os << " ->";
    if (b.succs.empty()) os << " end";
    for (std::size_t i = 0; i < b.succs.size(); ++i)
      os << (i ? ", " : " ") << g.blocks[b.succs[i]].label;
    os << '\n';
  }
  return os.str();
}

}  // namespace minidafny::ir
