#include "zoea/diagnostic.hpp"

#include <algorithm>

namespace zoea {

std::string_view to_string(Severity severity) {
  switch (severity) {
    case Severity::Info: return "info";
    case Severity::Warning: return "warning";
    case Severity::Error: return "error";
  }
  return "?";
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::string format(const Diagnostic& d) {
  std::string out(to_string(d.severity));
  out += " [" + d.code + "]";
  if (!d.where.empty()) out += " " + d.where + ":";
  out += " " + d.message;
  return out;
}

}  // namespace zoea
