#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace zoea {

enum class Severity { Info, Warning, Error };

std::string_view to_string(Severity severity);

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;     // stable machine-readable identifier, e.g. "RightToLeftDependency"
  std::string message;
  std::string where;    // human-readable location ("case 2, element 7"), may be empty
};

bool has_errors(const std::vector<Diagnostic>& diagnostics);

/// "error [Code] where: message"
std::string format(const Diagnostic& d);

}  // namespace zoea
