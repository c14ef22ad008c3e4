#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace zoea {

enum class ValueKind { Null, Boolean, Number, Text, List, Table, Object, Empty };

/// The kind of element an empty placeholder stands in for.
enum class EmptyKind { Scalar, List, Table, Object };

std::string_view to_string(ValueKind kind);
std::string_view to_string(EmptyKind kind);
std::optional<EmptyKind> empty_kind_from_string(std::string_view name);

class ValueError : public std::runtime_error {
 public:
  enum class Code { EmptyPresent, ParseError, ShapeError, DuplicateKey, TypeError };

  ValueError(Code code, const std::string& message, std::size_t position = 0)
      : std::runtime_error(message), code_(code), position_(position) {}

  Code code() const noexcept { return code_; }
  /// Byte offset into the parsed text (ParseError only).
  std::size_t position() const noexcept { return position_; }

 private:
  Code code_;
  std::size_t position_;
};

/// A decimal number that remembers how it was written.
///
/// Comparison is numeric (1 == 1.0); printing reproduces the original lexical
/// form. Numbers produced by arithmetic use the shortest round-trip form.
class Number {
 public:
  Number() = default;

  static Number from_double(double value);
  static Number from_integer(long long value);
  /// Parses a JSON number token. Returns nullopt if `lexical` is not one.
  static std::optional<Number> parse(std::string_view lexical);

  double value() const noexcept { return value_; }
  const std::string& lexical() const noexcept { return lexical_; }
  bool is_integer() const noexcept;

  friend bool operator==(const Number& a, const Number& b) noexcept { return a.value_ == b.value_; }

 private:
  Number(std::string lexical, double value) : lexical_(std::move(lexical)), value_(value) {}

  std::string lexical_ = "0";
  double value_ = 0.0;
};

/// Immutable JSON-representable datum. Composite payloads are shared, so
/// copies are cheap.
class Value {
 public:
  using Items = std::vector<Value>;
  using Row = std::vector<Value>;
  using Rows = std::vector<Row>;
  using Entry = std::pair<std::string, Value>;
  using Entries = std::vector<Entry>;

  Value() = default;  // null

  static Value null() { return Value(); }
  static Value boolean(bool b);
  static Value number(Number n);
  static Value number(double d) { return number(Number::from_double(d)); }
  static Value integer(long long i) { return number(Number::from_integer(i)); }
  static Value text(std::string s);
  static Value list(Items items);
  /// Throws ValueError(ShapeError) unless rows is non-empty and rectangular
  /// with at least one column.
  static Value table(Rows rows);
  /// Throws ValueError(DuplicateKey) on a repeated key.
  static Value object(Entries entries);
  static Value empty(EmptyKind kind);

  ValueKind kind() const noexcept;
  bool is_scalar() const noexcept;
  bool is_null() const noexcept { return kind() == ValueKind::Null; }
  bool is_empty_marker() const noexcept { return kind() == ValueKind::Empty; }
  /// List or Table (a table reads as a list of row lists).
  bool is_sequence() const noexcept;

  bool as_bool() const;
  const Number& as_number() const;
  const std::string& as_text() const;
  const Items& items() const;
  const Rows& rows() const;
  const Entries& entries() const;
  EmptyKind empty_kind() const;

  /// Items of a List, or the rows of a Table as List values.
  Items sequence_items() const;
  std::size_t sequence_size() const;

  /// Object lookup; nullptr when absent.
  const Value* find(std::string_view key) const;

  bool contains_empty() const;

  /// Hash consistent with deep_equal.
  std::size_t hash() const;

 private:
  struct Marker {
    EmptyKind kind;
  };
  using Storage = std::variant<std::monostate, bool, Number, std::string, std::shared_ptr<const Items>,
                               std::shared_ptr<const Rows>, std::shared_ptr<const Entries>, Marker>;

  explicit Value(Storage s) : data_(std::move(s)) {}

  Storage data_;
};

/// Structural equality. Numbers compare numerically, text byte-exact, and a
/// Table equals the List of row Lists with the same content.
bool deep_equal(const Value& a, const Value& b);

inline bool operator==(const Value& a, const Value& b) { return deep_equal(a, b); }

/// Total order used by sorting primitives: defined for two numbers or two
/// texts. Returns nullopt for any other pairing.
std::optional<int> compare_scalars(const Value& a, const Value& b);

/// Compact JSON. Throws ValueError(EmptyPresent) if an empty marker is reachable.
std::string to_json(const Value& v);

/// Strict JSON parse. `hint` selects how the top-level value is read:
/// Table turns an array of equal-length arrays into a Table (ShapeError if
/// ragged), anything else reads arrays as Lists.
Value from_json(std::string_view text, std::optional<ValueKind> hint = std::nullopt);

/// Reads one value from a larger source text.
///
/// Relaxed mode accepts the Zoea data syntax on top of JSON: bare words
/// (read as numbers, literals or text), single-quoted strings, and `#`
/// comments inside composite values.
class ValueReader {
 public:
  ValueReader(std::string_view source, bool relaxed, std::size_t position = 0)
      : src_(source), relaxed_(relaxed), pos_(position) {}

  Value read();
  std::size_t position() const noexcept { return pos_; }
  void skip_space();
  bool at_end() const noexcept { return pos_ >= src_.size(); }

  static bool is_bare_char(char c);

 private:
  Value read_value(int depth);
  Value read_array(int depth);
  Value read_object(int depth);
  std::string read_string(char quote);
  Value read_bare();
  [[noreturn]] void fail(const std::string& what) const;

  std::string_view src_;
  bool relaxed_;
  std::size_t pos_;
};

/// JSON string literal (double quoted, escaped).
std::string quote_json(std::string_view s);

}  // namespace zoea
