#include "zoea/zoea_text.hpp"

#include <algorithm>
#include <array>

namespace zoea {

namespace {

constexpr std::array<std::string_view, 7> kTags = {"program", "use", "data", "case", "input", "derive", "output"};

bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

bool is_known_tag(std::string_view word) {
  return std::find(kTags.begin(), kTags.end(), word) != kTags.end();
}

std::string case_label(const Value& id) {
  try {
    return to_json(id);
  } catch (const ValueError&) {
    return "?";
  }
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  ZoeaProgram run() {
    skip_layout();
    if (at_end()) throw error(ZoeaParseError::Kind::ValueParseError, pos_, "empty source, expected 'program:'");
    std::string first = read_tag();
    if (first != "program") {
      throw error(ZoeaParseError::Kind::MisplacedTag, tag_pos_, "source must start with 'program:', found '" + first + ":'");
    }
    program_.name = read_name("program");

    while (true) {
      skip_layout();
      if (at_end()) break;
      const std::string tag = read_tag();
      handle(tag);
    }
    finish_case();
    if (program_.cases.empty()) throw error(ZoeaParseError::Kind::NoCases, pos_, "program has no cases");
    return std::move(program_);
  }

 private:
  struct OpenCase {
    ZoeaCase c;
    bool has_input = false;
    bool has_output = false;
    std::size_t line = 0;
  };

  bool at_end() const { return pos_ >= src_.size(); }

  std::size_t line_of(std::size_t offset) const {
    offset = std::min(offset, src_.size());
    return 1 + static_cast<std::size_t>(std::count(src_.begin(), src_.begin() + static_cast<long>(offset), '\n'));
  }

  ZoeaParseError error(ZoeaParseError::Kind kind, std::size_t offset, std::string detail) const {
    return ZoeaParseError(kind, line_of(offset), std::move(detail));
  }

  // Whitespace and comments between fields. Comments are kept.
  void skip_layout() {
    while (!at_end()) {
      const char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
        ++pos_;
      } else if (c == '#') {
        const std::size_t start = ++pos_;
        while (!at_end() && src_[pos_] != '\n') ++pos_;
        std::string text(src_.substr(start, pos_ - start));
        if (!text.empty() && text.back() == '\r') text.pop_back();
        program_.comments.push_back({program_.cases.size() + (open_ ? 1 : 0), std::move(text)});
      } else {
        break;
      }
    }
  }

  // Identifier immediately followed by ':' at the current position.
  std::optional<std::string> peek_tag() const {
    std::size_t p = pos_;
    if (p >= src_.size() || !is_ident_start(src_[p])) return std::nullopt;
    while (p < src_.size() && is_ident_char(src_[p])) ++p;
    if (p >= src_.size() || src_[p] != ':') return std::nullopt;
    // A bare word that merely starts with an identifier ("a-b:") is not a tag.
    return std::string(src_.substr(pos_, p - pos_));
  }

  std::string read_tag() {
    tag_pos_ = pos_;
    auto tag = peek_tag();
    if (!tag) {
      std::size_t end = pos_;
      while (end < src_.size() && ValueReader::is_bare_char(src_[end])) ++end;
      std::string token(src_.substr(pos_, std::max<std::size_t>(end - pos_, 1)));
      throw error(ZoeaParseError::Kind::ValueParseError, pos_, "expected a tag, found '" + token + "'");
    }
    if (!is_known_tag(*tag)) throw error(ZoeaParseError::Kind::UnknownTag, pos_, "unknown tag '" + *tag + ":'");
    pos_ += tag->size() + 1;
    return *tag;
  }

  Value read_value(const std::string& tag) {
    skip_value_space();
    if (at_end()) throw error(ZoeaParseError::Kind::ValueParseError, pos_, "missing value for '" + tag + ":'");
    if (auto next = peek_tag()) {
      if (is_known_tag(*next)) {
        throw error(ZoeaParseError::Kind::ValueParseError, pos_, "missing value for '" + tag + ":'");
      }
      throw error(ZoeaParseError::Kind::UnknownTag, pos_, "unknown tag '" + *next + ":'");
    }
    ValueReader reader(src_, /*relaxed=*/true, pos_);
    try {
      Value v = reader.read();
      pos_ = reader.position();
      return v;
    } catch (const ValueError& e) {
      throw error(ZoeaParseError::Kind::ValueParseError, e.position(), "in '" + tag + ":' value: " + e.what());
    }
  }

  // Value position: skip whitespace and comments, recording comments too.
  void skip_value_space() { skip_layout(); }

  std::string read_name(const std::string& tag) {
    const std::size_t at = pos_;
    Value v = read_value(tag);
    if (v.kind() != ValueKind::Text || v.as_text().empty()) {
      throw error(ZoeaParseError::Kind::ValueParseError, at, "'" + tag + ":' expects a program name");
    }
    return v.as_text();
  }

  void finish_case() {
    if (!open_) return;
    OpenCase oc = std::move(*open_);
    open_.reset();
    if (!oc.has_input) {
      throw ZoeaParseError(ZoeaParseError::Kind::MissingField, oc.line,
                           "case " + case_label(oc.c.id) + " has no 'input:'");
    }
    if (!oc.has_output) {
      throw ZoeaParseError(ZoeaParseError::Kind::MissingField, oc.line,
                           "case " + case_label(oc.c.id) + " has no 'output:'");
    }
    program_.cases.push_back(std::move(oc.c));
  }

  void handle(const std::string& tag) {
    const std::size_t at = tag_pos_;
    if (tag == "program") {
      throw error(ZoeaParseError::Kind::DuplicateField, at, "second 'program:' tag");
    }
    if (tag == "use") {
      program_.uses.push_back(read_name(tag));
      return;
    }
    if (tag == "data") {
      if (program_.data) throw error(ZoeaParseError::Kind::DuplicateField, at, "second 'data:' field");
      program_.data = read_value(tag);
      return;
    }
    if (tag == "case") {
      finish_case();
      const std::size_t value_at = pos_;
      Value id = read_value(tag);
      if (!id.is_scalar()) throw error(ZoeaParseError::Kind::ValueParseError, value_at, "case id must be a scalar");
      open_ = OpenCase{};
      open_->c.id = std::move(id);
      open_->line = line_of(at);
      return;
    }
    // input / derive / output
    if (!open_) throw error(ZoeaParseError::Kind::MisplacedTag, at, "'" + tag + ":' outside of a case");
    Value v = read_value(tag);
    if (tag == "derive") {
      open_->c.derives.push_back(std::move(v));
    } else if (tag == "input") {
      if (open_->has_input) {
        throw error(ZoeaParseError::Kind::DuplicateField, at, "case " + case_label(open_->c.id) + " repeats 'input:'");
      }
      open_->has_input = true;
      open_->c.input = std::move(v);
    } else {
      if (open_->has_output) {
        throw error(ZoeaParseError::Kind::DuplicateField, at, "case " + case_label(open_->c.id) + " repeats 'output:'");
      }
      open_->has_output = true;
      open_->c.output = std::move(v);
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t tag_pos_ = 0;
  ZoeaProgram program_;
  std::optional<OpenCase> open_;
};

bool prints_bare(std::string_view word) {
  if (word.empty()) return false;
  if (!std::all_of(word.begin(), word.end(), ValueReader::is_bare_char)) return false;
  if (word == "true" || word == "false" || word == "null") return false;
  if (Number::parse(word)) return false;
  return true;
}

std::string print_name(std::string_view name) {
  return prints_bare(name) ? std::string(name) : quote_json(name);
}

}  // namespace

ZoeaParseError::ZoeaParseError(Kind kind, std::size_t line, std::string detail)
    : std::runtime_error("line " + std::to_string(line) + ": " + std::string(to_string(kind)) + ": " + detail),
      kind_(kind),
      line_(line),
      detail_(std::move(detail)) {}

std::string_view to_string(ZoeaParseError::Kind kind) {
  switch (kind) {
    case ZoeaParseError::Kind::UnknownTag: return "UnknownTag";
    case ZoeaParseError::Kind::MissingField: return "MissingField";
    case ZoeaParseError::Kind::DuplicateField: return "DuplicateField";
    case ZoeaParseError::Kind::ValueParseError: return "ValueParseError";
    case ZoeaParseError::Kind::NoCases: return "NoCases";
    case ZoeaParseError::Kind::MisplacedTag: return "MisplacedTag";
  }
  return "?";
}

bool same_ast(const ZoeaProgram& a, const ZoeaProgram& b) {
  if (a.name != b.name || a.uses != b.uses) return false;
  if (a.data.has_value() != b.data.has_value()) return false;
  if (a.data && !deep_equal(*a.data, *b.data)) return false;
  if (a.cases.size() != b.cases.size()) return false;
  for (std::size_t i = 0; i < a.cases.size(); ++i) {
    const auto& x = a.cases[i];
    const auto& y = b.cases[i];
    // Case ids compare by kind as well: "1" and 1 are different labels.
    if (x.id.kind() != y.id.kind() || !deep_equal(x.id, y.id)) return false;
    if (!deep_equal(x.input, y.input) || !deep_equal(x.output, y.output)) return false;
    if (x.derives.size() != y.derives.size()) return false;
    for (std::size_t k = 0; k < x.derives.size(); ++k) {
      if (!deep_equal(x.derives[k], y.derives[k])) return false;
    }
  }
  return true;
}

ZoeaProgram parse_zoea(std::string_view source) { return Parser(source).run(); }

std::string print_zoea(const ZoeaProgram& program) {
  std::string out;
  auto comments_for = [&](std::size_t anchor) {
    for (const auto& c : program.comments) {
      if (c.anchor == anchor) out += "#" + c.text + "\n";
    }
  };
  out += "program: " + print_name(program.name) + "\n";
  comments_for(0);
  for (const auto& use : program.uses) out += "use: " + print_name(use) + "\n";
  if (program.data) out += "data: " + to_json(*program.data) + "\n";
  for (std::size_t i = 0; i < program.cases.size(); ++i) {
    const auto& c = program.cases[i];
    out += "case: " + to_json(c.id) + "\n";
    out += "input: " + to_json(c.input) + "\n";
    for (const auto& d : c.derives) out += "derive: " + to_json(d) + "\n";
    out += "output: " + to_json(c.output) + "\n";
    comments_for(i + 1);
  }
  // Comments anchored past the last case (malformed anchors) go at the end.
  for (const auto& c : program.comments) {
    if (c.anchor > program.cases.size()) out += "#" + c.text + "\n";
  }
  return out;
}

std::vector<Diagnostic> validate_zoea(const ZoeaProgram& program, const std::set<std::string>* known_programs) {
  std::vector<Diagnostic> out;
  if (program.name.empty()) out.push_back({Severity::Error, "EmptyName", "program name is empty", ""});
  if (program.cases.empty()) out.push_back({Severity::Error, "NoCases", "program has no cases", ""});

  for (std::size_t i = 0; i < program.cases.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const auto& a = program.cases[j].id;
      const auto& b = program.cases[i].id;
      if (a.kind() == b.kind() && deep_equal(a, b)) {
        out.push_back({Severity::Error, "DuplicateCaseId", "case id " + case_label(b) + " is used more than once",
                       "case #" + std::to_string(i + 1)});
        break;
      }
    }
  }

  if (!program.cases.empty()) {
    const std::size_t expected = program.cases.front().derives.size();
    for (std::size_t i = 1; i < program.cases.size(); ++i) {
      const auto& c = program.cases[i];
      if (c.derives.size() != expected) {
        out.push_back({Severity::Warning, "UnequalDerives",
                       "case " + case_label(c.id) + " has " + std::to_string(c.derives.size()) +
                           " derive values, first case has " + std::to_string(expected),
                       "case #" + std::to_string(i + 1)});
      }
    }
  }

  std::set<std::string> seen;
  for (const auto& use : program.uses) {
    if (!seen.insert(use).second) {
      out.push_back({Severity::Warning, "DuplicateUse", "'" + use + "' is imported more than once", ""});
      continue;
    }
    if (use == program.name) {
      out.push_back({Severity::Error, "SelfUse", "program cannot use itself", ""});
      continue;
    }
    if (!known_programs || !known_programs->count(use)) {
      out.push_back({Severity::Info, "UnresolvedUse", "'" + use + "' is resolved at compile time", ""});
    }
  }
  return out;
}

}  // namespace zoea
