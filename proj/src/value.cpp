#include "zoea/value.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <unordered_set>

namespace zoea {

namespace {

constexpr int kMaxDepth = 256;

std::size_t mix(std::size_t seed, std::size_t h) {
  return seed ^ (h + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

bool is_json_number(std::string_view s) {
  std::size_t i = 0;
  const auto digit = [&](std::size_t k) { return k < s.size() && s[k] >= '0' && s[k] <= '9'; };
  if (i < s.size() && s[i] == '-') ++i;
  if (!digit(i)) return false;
  if (s[i] == '0') {
    ++i;
  } else {
    while (digit(i)) ++i;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    if (!digit(i)) return false;
    while (digit(i)) ++i;
  }
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    if (!digit(i)) return false;
    while (digit(i)) ++i;
  }
  return i == s.size();
}

void append_utf8(std::string& out, unsigned cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

void write_json(std::string& out, const Value& v) {
  switch (v.kind()) {
    case ValueKind::Null:
      out += "null";
      return;
    case ValueKind::Boolean:
      out += v.as_bool() ? "true" : "false";
      return;
    case ValueKind::Number:
      out += v.as_number().lexical();
      return;
    case ValueKind::Text:
      out += quote_json(v.as_text());
      return;
    case ValueKind::List: {
      out += '[';
      bool first = true;
      for (const auto& item : v.items()) {
        if (!first) out += ',';
        first = false;
        write_json(out, item);
      }
      out += ']';
      return;
    }
    case ValueKind::Table: {
      out += '[';
      bool first_row = true;
      for (const auto& row : v.rows()) {
        if (!first_row) out += ',';
        first_row = false;
        out += '[';
        bool first = true;
        for (const auto& cell : row) {
          if (!first) out += ',';
          first = false;
          write_json(out, cell);
        }
        out += ']';
      }
      out += ']';
      return;
    }
    case ValueKind::Object: {
      out += '{';
      bool first = true;
      for (const auto& [key, item] : v.entries()) {
        if (!first) out += ',';
        first = false;
        out += quote_json(key);
        out += ':';
        write_json(out, item);
      }
      out += '}';
      return;
    }
    case ValueKind::Empty:
      throw ValueError(ValueError::Code::EmptyPresent,
                       "empty " + std::string(to_string(v.empty_kind())) + " placeholder cannot be serialized");
  }
}

bool rows_equal_items(const Value::Rows& rows, const Value::Items& items) {
  if (rows.size() != items.size()) return false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!items[i].is_sequence()) return false;
    if (!deep_equal(Value::list(rows[i]), items[i])) return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::Null: return "null";
    case ValueKind::Boolean: return "boolean";
    case ValueKind::Number: return "number";
    case ValueKind::Text: return "text";
    case ValueKind::List: return "list";
    case ValueKind::Table: return "table";
    case ValueKind::Object: return "object";
    case ValueKind::Empty: return "empty";
  }
  return "?";
}

std::string_view to_string(EmptyKind kind) {
  switch (kind) {
    case EmptyKind::Scalar: return "scalar";
    case EmptyKind::List: return "list";
    case EmptyKind::Table: return "table";
    case EmptyKind::Object: return "object";
  }
  return "?";
}

std::optional<EmptyKind> empty_kind_from_string(std::string_view name) {
  if (name == "scalar") return EmptyKind::Scalar;
  if (name == "list") return EmptyKind::List;
  if (name == "table") return EmptyKind::Table;
  if (name == "object") return EmptyKind::Object;
  return std::nullopt;
}

// ---- Number ----------------------------------------------------------------

Number Number::from_double(double value) {
  if (value == 0.0) value = 0.0;  // fold -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return Number(std::string(buf, res.ptr), value);
}

Number Number::from_integer(long long value) {
  return Number(std::to_string(value), static_cast<double>(value));
}

std::optional<Number> Number::parse(std::string_view lexical) {
  if (!is_json_number(lexical)) return std::nullopt;
  double d = 0.0;
  auto res = std::from_chars(lexical.data(), lexical.data() + lexical.size(), d);
  if (res.ec == std::errc::result_out_of_range) {
    d = std::strtod(std::string(lexical).c_str(), nullptr);
  } else if (res.ec != std::errc()) {
    return std::nullopt;
  }
  if (!std::isfinite(d)) return std::nullopt;
  return Number(std::string(lexical), d);
}

bool Number::is_integer() const noexcept {
  return std::isfinite(value_) && std::floor(value_) == value_;
}

// ---- Value -----------------------------------------------------------------

Value Value::boolean(bool b) { return Value(Storage(b)); }
Value Value::number(Number n) { return Value(Storage(std::move(n))); }
Value Value::text(std::string s) { return Value(Storage(std::move(s))); }

Value Value::list(Items items) {
  return Value(Storage(std::make_shared<const Items>(std::move(items))));
}

Value Value::table(Rows rows) {
  if (rows.empty()) throw ValueError(ValueError::Code::ShapeError, "table needs at least one row");
  const std::size_t width = rows.front().size();
  if (width == 0) throw ValueError(ValueError::Code::ShapeError, "table needs at least one column");
  for (const auto& row : rows) {
    if (row.size() != width) throw ValueError(ValueError::Code::ShapeError, "ragged table rows");
  }
  return Value(Storage(std::make_shared<const Rows>(std::move(rows))));
}

Value Value::object(Entries entries) {
  std::unordered_set<std::string_view> seen;
  for (const auto& e : entries) {
    if (!seen.insert(e.first).second) {
      throw ValueError(ValueError::Code::DuplicateKey, "duplicate object key '" + e.first + "'");
    }
  }
  return Value(Storage(std::make_shared<const Entries>(std::move(entries))));
}

Value Value::empty(EmptyKind kind) { return Value(Storage(Marker{kind})); }

ValueKind Value::kind() const noexcept {
  switch (data_.index()) {
    case 0: return ValueKind::Null;
    case 1: return ValueKind::Boolean;
    case 2: return ValueKind::Number;
    case 3: return ValueKind::Text;
    case 4: return ValueKind::List;
    case 5: return ValueKind::Table;
    case 6: return ValueKind::Object;
    default: return ValueKind::Empty;
  }
}

bool Value::is_scalar() const noexcept {
  const auto k = kind();
  return k == ValueKind::Null || k == ValueKind::Boolean || k == ValueKind::Number || k == ValueKind::Text;
}

bool Value::is_sequence() const noexcept {
  const auto k = kind();
  return k == ValueKind::List || k == ValueKind::Table;
}

namespace {
[[noreturn]] void wrong_kind(ValueKind want, ValueKind have) {
  throw ValueError(ValueError::Code::TypeError,
                   "expected " + std::string(to_string(want)) + ", have " + std::string(to_string(have)));
}
}  // namespace

bool Value::as_bool() const {
  if (auto* b = std::get_if<bool>(&data_)) return *b;
  wrong_kind(ValueKind::Boolean, kind());
}

const Number& Value::as_number() const {
  if (auto* n = std::get_if<Number>(&data_)) return *n;
  wrong_kind(ValueKind::Number, kind());
}

const std::string& Value::as_text() const {
  if (auto* s = std::get_if<std::string>(&data_)) return *s;
  wrong_kind(ValueKind::Text, kind());
}

const Value::Items& Value::items() const {
  if (auto* p = std::get_if<std::shared_ptr<const Items>>(&data_)) return **p;
  wrong_kind(ValueKind::List, kind());
}

const Value::Rows& Value::rows() const {
  if (auto* p = std::get_if<std::shared_ptr<const Rows>>(&data_)) return **p;
  wrong_kind(ValueKind::Table, kind());
}

const Value::Entries& Value::entries() const {
  if (auto* p = std::get_if<std::shared_ptr<const Entries>>(&data_)) return **p;
  wrong_kind(ValueKind::Object, kind());
}

EmptyKind Value::empty_kind() const {
  if (auto* m = std::get_if<Marker>(&data_)) return m->kind;
  wrong_kind(ValueKind::Empty, kind());
}

Value::Items Value::sequence_items() const {
  if (kind() == ValueKind::List) return items();
  Items out;
  for (const auto& row : rows()) out.push_back(Value::list(row));
  return out;
}

std::size_t Value::sequence_size() const {
  return kind() == ValueKind::List ? items().size() : rows().size();
}

const Value* Value::find(std::string_view key) const {
  for (const auto& [k, v] : entries()) {
    if (k == key) return &v;
  }
  return nullptr;
}

bool Value::contains_empty() const {
  switch (kind()) {
    case ValueKind::Empty:
      return true;
    case ValueKind::List:
      for (const auto& item : items()) {
        if (item.contains_empty()) return true;
      }
      return false;
    case ValueKind::Table:
      for (const auto& row : rows()) {
        for (const auto& cell : row) {
          if (cell.contains_empty()) return true;
        }
      }
      return false;
    case ValueKind::Object:
      for (const auto& entry : entries()) {
        if (entry.second.contains_empty()) return true;
      }
      return false;
    default:
      return false;
  }
}

std::size_t Value::hash() const {
  switch (kind()) {
    case ValueKind::Null:
      return 0x51;
    case ValueKind::Boolean:
      return as_bool() ? 0x71 : 0x70;
    case ValueKind::Number: {
      double d = as_number().value();
      if (d == 0.0) d = 0.0;
      return mix(0x33, std::hash<double>{}(d));
    }
    case ValueKind::Text:
      return mix(0x44, std::hash<std::string>{}(as_text()));
    case ValueKind::List: {
      std::size_t h = 0x55;
      for (const auto& item : items()) h = mix(h, item.hash());
      return h;
    }
    case ValueKind::Table: {
      // Hash as the equivalent list of row lists.
      std::size_t h = 0x55;
      for (const auto& row : rows()) {
        std::size_t r = 0x55;
        for (const auto& cell : row) r = mix(r, cell.hash());
        h = mix(h, r);
      }
      return h;
    }
    case ValueKind::Object: {
      std::size_t h = 0x66;
      for (const auto& [k, v] : entries()) {
        h = mix(h, std::hash<std::string>{}(k));
        h = mix(h, v.hash());
      }
      return h;
    }
    case ValueKind::Empty:
      return mix(0x77, static_cast<std::size_t>(empty_kind()));
  }
  return 0;
}

bool deep_equal(const Value& a, const Value& b) {
  const auto ka = a.kind();
  const auto kb = b.kind();
  if (ka != kb) {
    if (ka == ValueKind::Table && kb == ValueKind::List) return rows_equal_items(a.rows(), b.items());
    if (ka == ValueKind::List && kb == ValueKind::Table) return rows_equal_items(b.rows(), a.items());
    return false;
  }
  switch (ka) {
    case ValueKind::Null:
      return true;
    case ValueKind::Boolean:
      return a.as_bool() == b.as_bool();
    case ValueKind::Number:
      return a.as_number() == b.as_number();
    case ValueKind::Text:
      return a.as_text() == b.as_text();
    case ValueKind::List: {
      const auto& x = a.items();
      const auto& y = b.items();
      if (&x == &y) return true;
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (!deep_equal(x[i], y[i])) return false;
      }
      return true;
    }
    case ValueKind::Table: {
      const auto& x = a.rows();
      const auto& y = b.rows();
      if (&x == &y) return true;
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].size() != y[i].size()) return false;
        for (std::size_t j = 0; j < x[i].size(); ++j) {
          if (!deep_equal(x[i][j], y[i][j])) return false;
        }
      }
      return true;
    }
    case ValueKind::Object: {
      const auto& x = a.entries();
      const auto& y = b.entries();
      if (&x == &y) return true;
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].first != y[i].first || !deep_equal(x[i].second, y[i].second)) return false;
      }
      return true;
    }
    case ValueKind::Empty:
      return a.empty_kind() == b.empty_kind();
  }
  return false;
}

std::optional<int> compare_scalars(const Value& a, const Value& b) {
  if (a.kind() == ValueKind::Number && b.kind() == ValueKind::Number) {
    const double x = a.as_number().value();
    const double y = b.as_number().value();
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  if (a.kind() == ValueKind::Text && b.kind() == ValueKind::Text) {
    const int c = a.as_text().compare(b.as_text());
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  return std::nullopt;
}

std::string quote_json(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  out += '"';
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  out += '"';
  return out;
}

std::string to_json(const Value& v) {
  std::string out;
  write_json(out, v);
  return out;
}

Value from_json(std::string_view text, std::optional<ValueKind> hint) {
  ValueReader reader(text, /*relaxed=*/false);
  reader.skip_space();
  Value v = reader.read();
  reader.skip_space();
  if (!reader.at_end()) {
    throw ValueError(ValueError::Code::ParseError, "trailing characters after JSON value", reader.position());
  }
  if (hint == ValueKind::Table) {
    if (v.kind() != ValueKind::List) throw ValueError(ValueError::Code::ShapeError, "table must be an array of arrays");
    Value::Rows rows;
    for (const auto& item : v.items()) {
      if (item.kind() == ValueKind::Table) {
        rows.push_back(item.sequence_items());
      } else if (item.kind() == ValueKind::List) {
        rows.push_back(item.items());
      } else {
        throw ValueError(ValueError::Code::ShapeError, "table row is not an array");
      }
    }
    return Value::table(std::move(rows));
  }
  if (hint == ValueKind::List && v.kind() != ValueKind::List) {
    throw ValueError(ValueError::Code::ShapeError, "expected a JSON array");
  }
  if (hint == ValueKind::Object && v.kind() != ValueKind::Object) {
    throw ValueError(ValueError::Code::ShapeError, "expected a JSON object");
  }
  return v;
}

// ---- ValueReader -----------------------------------------------------------

bool ValueReader::is_bare_char(char c) {
  switch (c) {
    case ' ': case '\t': case '\n': case '\r': case '\f': case '\v':
    case ',': case '[': case ']': case '{': case '}': case ':':
    case '"': case '\'': case '#':
      return false;
    default:
      return c != '\0';
  }
}

void ValueReader::fail(const std::string& what) const {
  throw ValueError(ValueError::Code::ParseError, what, pos_);
}

void ValueReader::skip_space() {
  while (pos_ < src_.size()) {
    const char c = src_[pos_];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++pos_;
    } else if (relaxed_ && (c == '#')) {
      while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
    } else if (relaxed_ && (c == '\f' || c == '\v')) {
      ++pos_;
    } else {
      break;
    }
  }
}

Value ValueReader::read() { return read_value(0); }

Value ValueReader::read_value(int depth) {
  if (depth > kMaxDepth) fail("values nested too deeply");
  skip_space();
  if (at_end()) fail("unexpected end of input, expected a value");
  const char c = src_[pos_];
  if (c == '[') return read_array(depth);
  if (c == '{') return read_object(depth);
  if (c == '"') return Value::text(read_string('"'));
  if (relaxed_ && c == '\'') return Value::text(read_string('\''));
  if (relaxed_) return read_bare();

  // Strict scalars.
  auto starts = [&](std::string_view lit) { return src_.substr(pos_, lit.size()) == lit; };
  if (starts("true")) {
    pos_ += 4;
    return Value::boolean(true);
  }
  if (starts("false")) {
    pos_ += 5;
    return Value::boolean(false);
  }
  if (starts("null")) {
    pos_ += 4;
    return Value::null();
  }
  if (c == '-' || (c >= '0' && c <= '9')) {
    std::size_t end = pos_;
    while (end < src_.size()) {
      const char d = src_[end];
      if ((d >= '0' && d <= '9') || d == '-' || d == '+' || d == '.' || d == 'e' || d == 'E') {
        ++end;
      } else {
        break;
      }
    }
    auto n = Number::parse(src_.substr(pos_, end - pos_));
    if (!n) fail("malformed number");
    pos_ = end;
    return Value::number(std::move(*n));
  }
  fail(std::string("unexpected character '") + c + "'");
}

Value ValueReader::read_array(int depth) {
  ++pos_;  // '['
  Value::Items items;
  skip_space();
  if (pos_ < src_.size() && src_[pos_] == ']') {
    ++pos_;
    return Value::list(std::move(items));
  }
  while (true) {
    items.push_back(read_value(depth + 1));
    skip_space();
    if (at_end()) fail("unterminated array");
    if (src_[pos_] == ',') {
      ++pos_;
      continue;
    }
    if (src_[pos_] == ']') {
      ++pos_;
      return Value::list(std::move(items));
    }
    fail("expected ',' or ']' in array");
  }
}

Value ValueReader::read_object(int depth) {
  ++pos_;  // '{'
  Value::Entries entries;
  skip_space();
  if (pos_ < src_.size() && src_[pos_] == '}') {
    ++pos_;
    return Value::object(std::move(entries));
  }
  while (true) {
    skip_space();
    if (at_end()) fail("unterminated object");
    std::string key;
    const char c = src_[pos_];
    if (c == '"') {
      key = read_string('"');
    } else if (relaxed_ && c == '\'') {
      key = read_string('\'');
    } else if (relaxed_ && is_bare_char(c)) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && is_bare_char(src_[pos_])) ++pos_;
      key = std::string(src_.substr(start, pos_ - start));
    } else {
      fail("expected object key");
    }
    skip_space();
    if (at_end() || src_[pos_] != ':') fail("expected ':' after object key");
    ++pos_;
    Value v = read_value(depth + 1);
    for (const auto& e : entries) {
      if (e.first == key) fail("duplicate object key '" + key + "'");
    }
    entries.emplace_back(std::move(key), std::move(v));
    skip_space();
    if (at_end()) fail("unterminated object");
    if (src_[pos_] == ',') {
      ++pos_;
      continue;
    }
    if (src_[pos_] == '}') {
      ++pos_;
      return Value::object(std::move(entries));
    }
    fail("expected ',' or '}' in object");
  }
}

std::string ValueReader::read_string(char quote) {
  ++pos_;  // opening quote
  std::string out;
  while (true) {
    if (at_end()) fail("unterminated string");
    const char c = src_[pos_++];
    if (c == quote) return out;
    if (static_cast<unsigned char>(c) < 0x20 && !(relaxed_ && (c == '\t'))) {
      --pos_;
      fail("control character in string");
    }
    if (c != '\\') {
      out += c;
      continue;
    }
    if (at_end()) fail("unterminated escape");
    const char e = src_[pos_++];
    switch (e) {
      case '"': out += '"'; break;
      case '\\': out += '\\'; break;
      case '/': out += '/'; break;
      case 'b': out += '\b'; break;
      case 'f': out += '\f'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case 't': out += '\t'; break;
      case '\'':
        if (!relaxed_) fail("invalid escape");
        out += '\'';
        break;
      case 'u': {
        auto hex4 = [&]() -> unsigned {
          if (pos_ + 4 > src_.size()) fail("truncated \\u escape");
          unsigned v = 0;
          auto res = std::from_chars(src_.data() + pos_, src_.data() + pos_ + 4, v, 16);
          if (res.ptr != src_.data() + pos_ + 4) fail("invalid \\u escape");
          pos_ += 4;
          return v;
        };
        unsigned cp = hex4();
        if (cp >= 0xD800 && cp <= 0xDBFF) {
          if (src_.substr(pos_, 2) != "\\u") fail("unpaired surrogate");
          pos_ += 2;
          const unsigned lo = hex4();
          if (lo < 0xDC00 || lo > 0xDFFF) fail("invalid low surrogate");
          cp = 0x10000 + ((cp - 0xD800) << 10) + (lo - 0xDC00);
        } else if (cp >= 0xDC00 && cp <= 0xDFFF) {
          fail("unpaired surrogate");
        }
        append_utf8(out, cp);
        break;
      }
      default:
        fail("invalid escape");
    }
  }
}

Value ValueReader::read_bare() {
  const std::size_t start = pos_;
  while (pos_ < src_.size() && is_bare_char(src_[pos_])) ++pos_;
  if (pos_ == start) fail(std::string("unexpected character '") + src_[pos_] + "'");
  const std::string_view word = src_.substr(start, pos_ - start);
  if (word == "true") return Value::boolean(true);
  if (word == "false") return Value::boolean(false);
  if (word == "null") return Value::null();
  if (auto n = Number::parse(word)) return Value::number(std::move(*n));
  return Value::text(std::string(word));
}

}  // namespace zoea
