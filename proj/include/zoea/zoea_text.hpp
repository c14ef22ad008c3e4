#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "zoea/diagnostic.hpp"
#include "zoea/value.hpp"

namespace zoea {

struct ZoeaCase {
  Value id;
  Value input;
  /// Intermediate step values in source order; the step index is the position.
  std::vector<Value> derives;
  Value output;
};

struct ZoeaComment {
  /// Number of cases opened before the comment (0 = program header).
  std::size_t anchor = 0;
  std::string text;  // without the leading '#'
};

struct ZoeaProgram {
  std::string name;
  std::vector<std::string> uses;
  std::optional<Value> data;
  std::vector<ZoeaCase> cases;
  std::vector<ZoeaComment> comments;
};

/// AST equality ignoring comments.
bool same_ast(const ZoeaProgram& a, const ZoeaProgram& b);

class ZoeaParseError : public std::runtime_error {
 public:
  enum class Kind { UnknownTag, MissingField, DuplicateField, ValueParseError, NoCases, MisplacedTag };

  ZoeaParseError(Kind kind, std::size_t line, std::string detail);

  Kind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Kind kind_;
  std::size_t line_;
  std::string detail_;
};

std::string_view to_string(ZoeaParseError::Kind kind);

/// Parses the textual Zoea dialect. Layout is insignificant: a known tag
/// followed by ':' opens a field and the field value is read as relaxed JSON.
ZoeaProgram parse_zoea(std::string_view source);

/// Canonical layout, one tag per line. Strings are printed double-quoted.
std::string print_zoea(const ZoeaProgram& program);

/// Structural checks that do not stop parsing. `known_programs`, when given,
/// suppresses the info note for `use` targets it contains.
std::vector<Diagnostic> validate_zoea(const ZoeaProgram& program,
                                      const std::set<std::string>* known_programs = nullptr);

}  // namespace zoea
