#include "minidafny/diagnostic.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace minidafny {

Span Span::cover(const Span& a, const Span& b) {
  Span s = a;
  if (std::tie(b.start_line, b.start_col) < std::tie(a.start_line, a.start_col)) {
    s.start_line = b.start_line;
    s.start_col = b.start_col;
  }
  if (std::tie(b.end_line, b.end_col) > std::tie(a.end_line, a.end_col)) {
    s.end_line = b.end_line;
    s.end_col = b.end_col;
  }
  return s;
}

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::Error: return "error";
    case Severity::Warning: return "warning";
    case Severity::Note: return "note";
  }
  return "error";
}

std::string Diagnostic::format() const {
  std::ostringstream os;
  os << (span.file.empty() ? "<input>" : span.file) << ':' << span.start_line << ':'
     << span.start_col << ": " << to_string(severity) << '[' << code << "]: " << message;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Diagnostic& d) { return os << d.format(); }

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

}  // namespace minidafny
