#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace minidafny {

/// 1-based source region. An empty `file` means "no file" (e.g. stdin).
struct Span {
  std::string file;
  int start_line = 1;
  int start_col = 1;
  int end_line = 1;
  int end_col = 1;

  bool operator==(const Span&) const = default;

  /// Smallest span covering both `a` and `b`.
  static Span cover(const Span& a, const Span& b);
};

enum class Severity { Error, Warning, Note };

std::string_view to_string(Severity s);

struct Diagnostic {
  Span span;
  Severity severity = Severity::Error;
  std::string code;
  std::string message;

  /// `file:line:col: severity[CODE]: message`
  std::string format() const;
};

std::ostream& operator<<(std::ostream& os, const Diagnostic& d);

bool has_errors(const std::vector<Diagnostic>& diags);

/// Diagnostic codes shared across the pipeline.
namespace codes {
inline constexpr const char* kSyntax = "SYNTAX";
inline constexpr const char* kLex = "LEX";
inline constexpr const char* kUnknownIdent = "UNKNOWN_IDENT";
inline constexpr const char* kTypeMismatch = "TYPE_MISMATCH";
inline constexpr const char* kAssignToInput = "ASSIGN_TO_INPUT";
inline constexpr const char* kMethodInExpr = "METHOD_IN_EXPR";
inline constexpr const char* kNotArray = "NOT_ARRAY";
inline constexpr const char* kDuplicateName = "DUPLICATE_NAME";
inline constexpr const char* kArity = "ARITY";
inline constexpr const char* kUnsupported = "UNSUPPORTED";
inline constexpr const char* kBreakOutsideLoop = "BREAK_OUTSIDE_LOOP";
inline constexpr const char* kReadsOnMethod = "READS_ON_METHOD";
inline constexpr const char* kGhostInCompiled = "GHOST_IN_COMPILED";
inline constexpr const char* kReadsViolation = "READS_VIOLATION";
inline constexpr const char* kModifiesViolation = "MODIFIES_VIOLATION";
inline constexpr const char* kCallFrameViolation = "CALL_FRAME_VIOLATION";
inline constexpr const char* kNoTermination = "NO_TERMINATION_MEASURE";
inline constexpr const char* kCounterexample = "COUNTEREXAMPLE";
inline constexpr const char* kReplay = "REPLAY";
inline constexpr const char* kSolverError = "SOLVER_ERROR";
inline constexpr const char* kInternal = "INTERNAL";
inline constexpr const char* kIo = "IO";
}  // namespace codes

}  // namespace minidafny
