#include "zoea/catalog.hpp"

#include <algorithm>
#include <cmath>

namespace zoea {

namespace kinds {
KindMask of(const Value& v) noexcept {
  switch (v.kind()) {
    case ValueKind::Null: return kNull;
    case ValueKind::Boolean: return kBoolean;
    case ValueKind::Number: return kNumber;
    case ValueKind::Text: return kText;
    case ValueKind::List: return kList;
    case ValueKind::Table: return kTable;
    case ValueKind::Object: return kObject;
    case ValueKind::Empty: return 0;
  }
  return 0;
}
}  // namespace kinds

std::string_view to_string(EvalErrorKind kind) {
  switch (kind) {
    case EvalErrorKind::TypeMismatch: return "TypeMismatch";
    case EvalErrorKind::DivByZero: return "DivByZero";
    case EvalErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case EvalErrorKind::KeyNotFound: return "KeyNotFound";
    case EvalErrorKind::InvalidArgument: return "InvalidArgument";
    case EvalErrorKind::NonFinite: return "NonFinite";
    case EvalErrorKind::ArityMismatch: return "ArityMismatch";
    case EvalErrorKind::UnknownImport: return "UnknownImport";
    case EvalErrorKind::UnboundSlot: return "UnboundSlot";
    case EvalErrorKind::InputOutOfRange: return "InputOutOfRange";
    case EvalErrorKind::ImportFailed: return "ImportFailed";
  }
  return "?";
}

namespace {

using namespace kinds;

EvalError fail(EvalErrorKind kind, std::string_view detail) { return EvalError{kind, detail, {}}; }

const Value& arg(PrimitiveArgs args, std::size_t i) { return *args[i]; }

EvalResult number_result(double d) {
  if (!std::isfinite(d)) return fail(EvalErrorKind::NonFinite, "arithmetic result is not finite");
  return Value::number(d);
}

bool is_continuation(char c) { return (static_cast<unsigned char>(c) & 0xC0) == 0x80; }

std::vector<std::string_view> code_points(const std::string& s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t j = i + 1;
    while (j < s.size() && is_continuation(s[j])) ++j;
    out.emplace_back(s.data() + i, j - i);
    i = j;
  }
  return out;
}

// Integer-valued index argument in [0, size).
std::optional<std::size_t> index_arg(const Value& v, std::size_t size) {
  const double d = v.as_number().value();
  if (std::floor(d) != d || d < 0 || d >= static_cast<double>(size)) return std::nullopt;
  return static_cast<std::size_t>(d);
}

// Rows of a Table, or of a List whose items are equal-length non-empty lists.
std::optional<Value::Rows> as_rows(const Value& v) {
  if (v.kind() == ValueKind::Table) return v.rows();
  if (v.kind() != ValueKind::List || v.items().empty()) return std::nullopt;
  Value::Rows rows;
  for (const auto& item : v.items()) {
    if (item.kind() != ValueKind::List) return std::nullopt;
    rows.push_back(item.items());
  }
  const std::size_t width = rows.front().size();
  if (width == 0) return std::nullopt;
  for (const auto& r : rows) {
    if (r.size() != width) return std::nullopt;
  }
  return rows;
}

// ---- string ----------------------------------------------------------------

EvalResult p_lowercase(PrimitiveArgs a) {
  std::string s = arg(a, 0).as_text();
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return (c >= 'A' && c <= 'Z') ? c + 32 : c; });
  return Value::text(std::move(s));
}

EvalResult p_uppercase(PrimitiveArgs a) {
  std::string s = arg(a, 0).as_text();
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return (c >= 'a' && c <= 'z') ? c - 32 : c; });
  return Value::text(std::move(s));
}

EvalResult p_trim(PrimitiveArgs a) {
  const std::string& s = arg(a, 0).as_text();
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && ws(s[b])) ++b;
  while (e > b && ws(s[e - 1])) --e;
  return Value::text(s.substr(b, e - b));
}

EvalResult p_concat(PrimitiveArgs a) { return Value::text(arg(a, 0).as_text() + arg(a, 1).as_text()); }

EvalResult p_split(PrimitiveArgs a) {
  const std::string& s = arg(a, 0).as_text();
  const std::string& sep = arg(a, 1).as_text();
  if (sep.empty()) return fail(EvalErrorKind::InvalidArgument, "split separator is empty");
  Value::Items parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t hit = s.find(sep, start);
    if (hit == std::string::npos) {
      parts.push_back(Value::text(s.substr(start)));
      break;
    }
    parts.push_back(Value::text(s.substr(start, hit - start)));
    start = hit + sep.size();
  }
  return Value::list(std::move(parts));
}

EvalResult p_join(PrimitiveArgs a) {
  const Value& list = arg(a, 0);
  if (list.kind() != ValueKind::List) return fail(EvalErrorKind::TypeMismatch, "join expects a list of text");
  const std::string& sep = arg(a, 1).as_text();
  std::string out;
  bool first = true;
  for (const auto& item : list.items()) {
    if (item.kind() != ValueKind::Text) return fail(EvalErrorKind::TypeMismatch, "join expects a list of text");
    if (!first) out += sep;
    first = false;
    out += item.as_text();
  }
  return Value::text(std::move(out));
}

EvalResult p_str_length(PrimitiveArgs a) {
  const std::string& s = arg(a, 0).as_text();
  const auto n = std::count_if(s.begin(), s.end(), [](char c) { return !is_continuation(c); });
  return Value::integer(n);
}

EvalResult p_str_reverse(PrimitiveArgs a) {
  auto cps = code_points(arg(a, 0).as_text());
  std::string out;
  for (auto it = cps.rbegin(); it != cps.rend(); ++it) out += *it;
  return Value::text(std::move(out));
}

EvalResult p_to_string(PrimitiveArgs a) {
  const Value& v = arg(a, 0);
  switch (v.kind()) {
    case ValueKind::Text: return v;
    case ValueKind::Number: return Value::text(v.as_number().lexical());
    default: return Value::text(to_json(v));
  }
}

// ---- list ------------------------------------------------------------------

EvalResult p_head(PrimitiveArgs a) {
  auto items = arg(a, 0).sequence_items();
  if (items.empty()) return fail(EvalErrorKind::IndexOutOfRange, "head of empty list");
  return items.front();
}

EvalResult p_last(PrimitiveArgs a) {
  auto items = arg(a, 0).sequence_items();
  if (items.empty()) return fail(EvalErrorKind::IndexOutOfRange, "last of empty list");
  return items.back();
}

EvalResult p_length(PrimitiveArgs a) { return Value::integer(static_cast<long long>(arg(a, 0).sequence_size())); }

EvalResult p_reverse(PrimitiveArgs a) {
  auto items = arg(a, 0).sequence_items();
  std::reverse(items.begin(), items.end());
  return Value::list(std::move(items));
}

EvalResult p_sort_asc(PrimitiveArgs a) {
  auto items = arg(a, 0).sequence_items();
  if (!items.empty()) {
    const ValueKind k = items.front().kind();
    if (k != ValueKind::Number && k != ValueKind::Text) {
      return fail(EvalErrorKind::TypeMismatch, "sort_asc needs numbers or text");
    }
    for (const auto& item : items) {
      if (item.kind() != k) return fail(EvalErrorKind::TypeMismatch, "sort_asc needs items of one kind");
    }
    std::stable_sort(items.begin(), items.end(),
                     [](const Value& x, const Value& y) { return *compare_scalars(x, y) < 0; });
  }
  return Value::list(std::move(items));
}

EvalResult p_distinct(PrimitiveArgs a) {
  Value::Items out;
  for (auto& item : arg(a, 0).sequence_items()) {
    const bool seen = std::any_of(out.begin(), out.end(), [&](const Value& o) { return deep_equal(o, item); });
    if (!seen) out.push_back(std::move(item));
  }
  return Value::list(std::move(out));
}

long long find_index(const Value& seq, const Value& needle) {
  if (seq.kind() == ValueKind::List) {
    const auto& items = seq.items();
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (deep_equal(items[i], needle)) return static_cast<long long>(i);
    }
    return -1;
  }
  const auto items = seq.sequence_items();
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (deep_equal(items[i], needle)) return static_cast<long long>(i);
  }
  return -1;
}

EvalResult p_member(PrimitiveArgs a) { return Value::boolean(find_index(arg(a, 0), arg(a, 1)) >= 0); }

EvalResult p_index_of(PrimitiveArgs a) { return Value::integer(find_index(arg(a, 0), arg(a, 1))); }

EvalResult p_nth(PrimitiveArgs a) {
  const Value& seq = arg(a, 0);
  auto i = index_arg(arg(a, 1), seq.sequence_size());
  if (!i) return fail(EvalErrorKind::IndexOutOfRange, "nth index out of range");
  if (seq.kind() == ValueKind::List) return seq.items()[*i];
  return Value::list(seq.rows()[*i]);
}

EvalResult p_append(PrimitiveArgs a) {
  auto items = arg(a, 0).sequence_items();
  items.push_back(arg(a, 1));
  return Value::list(std::move(items));
}

EvalResult p_flatten(PrimitiveArgs a) {
  Value::Items out;
  for (const auto& item : arg(a, 0).sequence_items()) {
    if (item.is_sequence()) {
      for (auto& inner : item.sequence_items()) out.push_back(std::move(inner));
    } else {
      out.push_back(item);
    }
  }
  return Value::list(std::move(out));
}

// ---- number ----------------------------------------------------------------

double num(PrimitiveArgs a, std::size_t i) { return arg(a, i).as_number().value(); }

EvalResult p_add(PrimitiveArgs a) { return number_result(num(a, 0) + num(a, 1)); }
EvalResult p_sub(PrimitiveArgs a) { return number_result(num(a, 0) - num(a, 1)); }
EvalResult p_mul(PrimitiveArgs a) { return number_result(num(a, 0) * num(a, 1)); }

EvalResult p_div(PrimitiveArgs a) {
  if (num(a, 1) == 0.0) return fail(EvalErrorKind::DivByZero, "division by zero");
  return number_result(num(a, 0) / num(a, 1));
}

EvalResult p_mod(PrimitiveArgs a) {
  const double x = num(a, 0);
  const double y = num(a, 1);
  if (y == 0.0) return fail(EvalErrorKind::DivByZero, "modulo by zero");
  return number_result(x - y * std::floor(x / y));
}

EvalResult p_neg(PrimitiveArgs a) { return number_result(-num(a, 0)); }
EvalResult p_abs(PrimitiveArgs a) { return number_result(std::fabs(num(a, 0))); }

EvalResult p_min(PrimitiveArgs a) { return num(a, 1) < num(a, 0) ? arg(a, 1) : arg(a, 0); }
EvalResult p_max(PrimitiveArgs a) { return num(a, 1) > num(a, 0) ? arg(a, 1) : arg(a, 0); }

// ---- predicate -------------------------------------------------------------

EvalResult p_eq(PrimitiveArgs a) { return Value::boolean(deep_equal(arg(a, 0), arg(a, 1))); }

EvalResult p_lt(PrimitiveArgs a) {
  auto c = compare_scalars(arg(a, 0), arg(a, 1));
  if (!c) return fail(EvalErrorKind::TypeMismatch, "lt compares two numbers or two texts");
  return Value::boolean(*c < 0);
}

EvalResult p_gt(PrimitiveArgs a) {
  auto c = compare_scalars(arg(a, 0), arg(a, 1));
  if (!c) return fail(EvalErrorKind::TypeMismatch, "gt compares two numbers or two texts");
  return Value::boolean(*c > 0);
}

EvalResult p_is_empty(PrimitiveArgs a) {
  const Value& v = arg(a, 0);
  switch (v.kind()) {
    case ValueKind::Text: return Value::boolean(v.as_text().empty());
    case ValueKind::List: return Value::boolean(v.items().empty());
    case ValueKind::Table: return Value::boolean(false);
    case ValueKind::Object: return Value::boolean(v.entries().empty());
    default: return fail(EvalErrorKind::TypeMismatch, "is_empty needs text, list, table or object");
  }
}

// ---- table -----------------------------------------------------------------

EvalResult p_row_at(PrimitiveArgs a) {
  auto rows = as_rows(arg(a, 0));
  if (!rows) return fail(EvalErrorKind::TypeMismatch, "row_at needs a table");
  auto i = index_arg(arg(a, 1), rows->size());
  if (!i) return fail(EvalErrorKind::IndexOutOfRange, "row index out of range");
  return Value::list((*rows)[*i]);
}

EvalResult p_col_at(PrimitiveArgs a) {
  auto rows = as_rows(arg(a, 0));
  if (!rows) return fail(EvalErrorKind::TypeMismatch, "col_at needs a table");
  auto j = index_arg(arg(a, 1), rows->front().size());
  if (!j) return fail(EvalErrorKind::IndexOutOfRange, "column index out of range");
  Value::Items col;
  for (const auto& r : *rows) col.push_back(r[*j]);
  return Value::list(std::move(col));
}

EvalResult p_transpose(PrimitiveArgs a) {
  auto rows = as_rows(arg(a, 0));
  if (!rows) return fail(EvalErrorKind::TypeMismatch, "transpose needs a table");
  Value::Rows out(rows->front().size());
  for (const auto& r : *rows) {
    for (std::size_t j = 0; j < r.size(); ++j) out[j].push_back(r[j]);
  }
  return Value::table(std::move(out));
}

EvalResult p_row_count(PrimitiveArgs a) {
  auto rows = as_rows(arg(a, 0));
  if (!rows) return fail(EvalErrorKind::TypeMismatch, "row_count needs a table");
  return Value::integer(static_cast<long long>(rows->size()));
}

EvalResult p_col_count(PrimitiveArgs a) {
  auto rows = as_rows(arg(a, 0));
  if (!rows) return fail(EvalErrorKind::TypeMismatch, "col_count needs a table");
  return Value::integer(static_cast<long long>(rows->front().size()));
}

// ---- object ----------------------------------------------------------------

EvalResult p_get(PrimitiveArgs a) {
  const Value* v = arg(a, 0).find(arg(a, 1).as_text());
  if (!v) return fail(EvalErrorKind::KeyNotFound, "object has no such key");
  return *v;
}

EvalResult p_keys(PrimitiveArgs a) {
  Value::Items out;
  for (const auto& e : arg(a, 0).entries()) out.push_back(Value::text(e.first));
  return Value::list(std::move(out));
}

EvalResult p_values(PrimitiveArgs a) {
  Value::Items out;
  for (const auto& e : arg(a, 0).entries()) out.push_back(e.second);
  return Value::list(std::move(out));
}

std::vector<Primitive> build_catalog() {
  return {
      // string
      {"lowercase", "string", 1, {kText}, kText, p_lowercase},
      {"uppercase", "string", 1, {kText}, kText, p_uppercase},
      {"trim", "string", 1, {kText}, kText, p_trim},
      {"concat", "string", 2, {kText, kText}, kText, p_concat},
      {"split", "string", 2, {kText, kText}, kList, p_split},
      {"join", "string", 2, {kList, kText}, kText, p_join},
      {"str_length", "string", 1, {kText}, kNumber, p_str_length},
      {"str_reverse", "string", 1, {kText}, kText, p_str_reverse},
      {"to_string", "string", 1, {kAny}, kText, p_to_string},
      // list
      {"head", "list", 1, {kSequence}, kAny, p_head},
      {"last", "list", 1, {kSequence}, kAny, p_last},
      {"length", "list", 1, {kSequence}, kNumber, p_length},
      {"reverse", "list", 1, {kSequence}, kList, p_reverse},
      {"sort_asc", "list", 1, {kSequence}, kList, p_sort_asc},
      {"distinct", "list", 1, {kSequence}, kList, p_distinct},
      {"member", "list", 2, {kSequence, kAny}, kBoolean, p_member},
      {"index_of", "list", 2, {kSequence, kAny}, kNumber, p_index_of},
      {"nth", "list", 2, {kSequence, kNumber}, kAny, p_nth},
      {"append", "list", 2, {kSequence, kAny}, kList, p_append},
      {"flatten", "list", 1, {kSequence}, kList, p_flatten},
      // number
      {"add", "number", 2, {kNumber, kNumber}, kNumber, p_add},
      {"sub", "number", 2, {kNumber, kNumber}, kNumber, p_sub},
      {"mul", "number", 2, {kNumber, kNumber}, kNumber, p_mul},
      {"div", "number", 2, {kNumber, kNumber}, kNumber, p_div},
      {"mod", "number", 2, {kNumber, kNumber}, kNumber, p_mod},
      {"neg", "number", 1, {kNumber}, kNumber, p_neg},
      {"abs", "number", 1, {kNumber}, kNumber, p_abs},
      {"min", "number", 2, {kNumber, kNumber}, kNumber, p_min},
      {"max", "number", 2, {kNumber, kNumber}, kNumber, p_max},
      // predicate
      {"eq", "predicate", 2, {kAny, kAny}, kBoolean, p_eq},
      {"lt", "predicate", 2, {kNumber | kText, kNumber | kText}, kBoolean, p_lt},
      {"gt", "predicate", 2, {kNumber | kText, kNumber | kText}, kBoolean, p_gt},
      {"is_empty", "predicate", 1, {kText | kSequence | kObject}, kBoolean, p_is_empty},
      // table
      {"row_at", "table", 2, {kSequence, kNumber}, kList, p_row_at},
      {"col_at", "table", 2, {kSequence, kNumber}, kList, p_col_at},
      {"transpose", "table", 1, {kSequence}, kTable, p_transpose},
      {"row_count", "table", 1, {kSequence}, kNumber, p_row_count},
      {"col_count", "table", 1, {kSequence}, kNumber, p_col_count},
      // object
      {"get", "object", 2, {kObject, kText}, kAny, p_get},
      {"keys", "object", 1, {kObject}, kList, p_keys},
      {"values", "object", 1, {kObject}, kList, p_values},
  };
}

}  // namespace

const std::vector<Primitive>& catalog_v1() {
  static const std::vector<Primitive> catalog = build_catalog();
  return catalog;
}

const Primitive* find_primitive(std::string_view name) {
  for (const auto& p : catalog_v1()) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

EvalResult call_primitive(const Primitive& prim, PrimitiveArgs args) {
  if (args.size() != prim.arity) return fail(EvalErrorKind::ArityMismatch, "wrong number of arguments");
  for (std::size_t i = 0; i < args.size(); ++i) {
    if ((kinds::of(*args[i]) & prim.arg_kinds[i]) == 0) {
      return fail(EvalErrorKind::TypeMismatch, "argument kind does not match the primitive signature");
    }
  }
  return prim.apply(args);
}

}  // namespace zoea
