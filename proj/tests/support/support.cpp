#include "support.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "zoea/catalog.hpp"
#include "zoea/interpreter.hpp"

namespace zt {

using namespace zoea;

const char* const kWeekDay = R"(program: is_week_day
# determines if input is a weekday
data: [ monday,tuesday,wednesday,
        thursday,friday,saturday,
        sunday ]
case: 1 input: thursday
      output: weekday
case: 2 input: 'MONDAY'
      output: weekday
case: 3 input: banana
      output: unrecognised
case: 4 input: ''
      output: unrecognised
)";

const std::vector<std::string>& week_days() {
  static const std::vector<std::string> days = {"monday", "tuesday", "wednesday", "thursday",
                                                "friday", "saturday", "sunday"};
  return days;
}

std::string is_week_day_reference(const std::string& input) {
  std::string lower;
  for (unsigned char c : input) lower.push_back(static_cast<char>(std::tolower(c)));
  const auto& days = week_days();
  return std::find(days.begin(), days.end(), lower) != days.end() ? "weekday" : "unrecognised";
}

std::vector<std::string> week_day_probes(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::string> probes;
  // 28 day spellings: every day lower, upper, capitalised, and in a random mix.
  for (const auto& day : week_days()) {
    std::string upper, title = day, mixed = day;
    for (char c : day) upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    title[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(title[0])));
    for (auto& c : mixed) {
      if (rng() % 2) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    probes.insert(probes.end(), {day, upper, title, mixed});
  }
  // 22 near misses and unrelated words.
  const std::vector<std::string> others = {"banana",  "",          "mon",        "weekday",  "thursdays", " monday",
                                           "Monday ", "sun day",   "funday",     "saturdy",  "MONDAYS",   "week",
                                           "tues",    "frIday!",   "wednes day", "apple",    "0",         "sunday1",
                                           "January", "unrecognised", "mondaymonday", "Ftiday"};
  probes.insert(probes.end(), others.begin(), others.end());
  return probes;
}

Document week_day_document(bool with_dependencies) {
  Document d;
  d.name = "is_week_day";
  const IdentityId data = 1, input = 2, output = 3;
  d.next_identity = 4;
  std::vector<Value> days;
  for (const auto& day : week_days()) days.push_back(Value::text(day));
  const Value day_list = Value::list(days);
  const std::vector<std::pair<std::string, std::string>> rows = {
      {"thursday", "weekday"}, {"MONDAY", "weekday"}, {"banana", "unrecognised"}, {"", "unrecognised"}};
  ElementId next = 1;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CaseDiagram c;
    c.id = std::to_string(i + 1);
    const ElementId de = next++, ie = next++, oe = next++;
    c.columns.push_back(Column{ColumnKind::Data, 0, {Element{de, data, Shape::List, day_list, std::nullopt}}});
    c.columns.push_back(
        Column{ColumnKind::Input, 0, {Element{ie, input, Shape::Scalar, Value::text(rows[i].first), std::nullopt}}});
    c.columns.push_back(
        Column{ColumnKind::Output, 0, {Element{oe, output, Shape::Scalar, Value::text(rows[i].second), std::nullopt}}});
    if (with_dependencies) c.dependencies.push_back(Dependency{{ie}, oe});
    d.cases.push_back(std::move(c));
  }
  d.next_element = next;
  return d;
}

// ---- values ---------------------------------------------------------------------

bool strict_equal(const Value& a, const Value& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ValueKind::Null: return true;
    case ValueKind::Boolean: return a.as_bool() == b.as_bool();
    case ValueKind::Number: return a.as_number().lexical() == b.as_number().lexical();
    case ValueKind::Text: return a.as_text() == b.as_text();
    case ValueKind::List: {
      const auto& x = a.items();
      const auto& y = b.items();
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (!strict_equal(x[i], y[i])) return false;
      }
      return true;
    }
    case ValueKind::Table: {
      const auto& x = a.rows();
      const auto& y = b.rows();
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].size() != y[i].size()) return false;
        for (std::size_t j = 0; j < x[i].size(); ++j) {
          if (!strict_equal(x[i][j], y[i][j])) return false;
        }
      }
      return true;
    }
    case ValueKind::Object: {
      const auto& x = a.entries();
      const auto& y = b.entries();
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].first != y[i].first || !strict_equal(x[i].second, y[i].second)) return false;
      }
      return true;
    }
    case ValueKind::Empty: return a.empty_kind() == b.empty_kind();
  }
  return false;
}

namespace {

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& xs) {
  return xs[rng() % xs.size()];
}

bool chance(Rng& rng, int percent) { return static_cast<int>(rng() % 100) < percent; }

Value random_number(Rng& rng) {
  static const std::vector<std::string> forms = {"0",    "-0",  "1",     "7",     "-3",     "42",   "2.50",
                                                 "0.1",  "1e3", "-2.5E-2", "1000000", "3.0", "123456789012"};
  if (chance(rng, 50)) return Value::integer(static_cast<long long>(rng() % 200) - 100);
  return Value::number(*Number::parse(pick(rng, forms)));
}

Value random_scalar(Rng& rng) {
  switch (rng() % 5) {
    case 0: return Value::null();
    case 1: return Value::boolean(rng() % 2);
    case 2: return random_number(rng);
    default: return Value::text(random_text(rng));
  }
}

}  // namespace

std::string random_text(Rng& rng, std::size_t max_len) {
  static const std::vector<std::string> atoms = {
      "a", "b", "z", "Q", "x", " ", "'", "\"", "\\", "#", ":", ",", "[", "]", "{", "}", "\t",
      "\n", "1", "-", "output:", "case:", "\xc3\xa9", "\xe6\x97\xa5", "true", "null", "_"};
  const std::size_t n = rng() % (max_len + 1);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += pick(rng, atoms);
  return s;
}

Value random_value(Rng& rng, int depth, bool allow_tables) {
  const int roll = static_cast<int>(rng() % 10);
  if (depth <= 0 || roll < 5) return random_scalar(rng);
  if (roll < 7) {
    Value::Items items;
    const std::size_t n = rng() % 4;
    for (std::size_t i = 0; i < n; ++i) items.push_back(random_value(rng, depth - 1, allow_tables));
    return Value::list(std::move(items));
  }
  if (roll < 8 && allow_tables) {
    const std::size_t rows = 1 + rng() % 3, cols = 1 + rng() % 3;
    Value::Rows table(rows);
    for (auto& row : table) {
      for (std::size_t j = 0; j < cols; ++j) row.push_back(random_scalar(rng));
    }
    return Value::table(std::move(table));
  }
  Value::Entries entries;
  std::set<std::string> keys;
  const std::size_t n = rng() % 4;
  for (std::size_t i = 0; i < n; ++i) {
    std::string k = random_text(rng, 4);
    if (!keys.insert(k).second) continue;
    entries.emplace_back(k, random_value(rng, depth - 1, allow_tables));
  }
  return Value::object(std::move(entries));
}

ZoeaProgram random_program(Rng& rng) {
  ZoeaProgram p;
  static const std::vector<std::string> names = {"is_week_day", "p", "helper-2", "a b", "x:y", "name#1", "'q'", "12"};
  p.name = chance(rng, 50) ? pick(rng, names) : "n" + random_text(rng, 5);
  const std::size_t uses = rng() % 3;
  for (std::size_t i = 0; i < uses; ++i) p.uses.push_back(pick(rng, names));
  if (chance(rng, 60)) p.data = random_value(rng, 3, false);
  const std::size_t cases = 1 + rng() % 4;
  for (std::size_t i = 0; i < cases; ++i) {
    ZoeaCase c;
    c.id = chance(rng, 70) ? Value::integer(static_cast<long long>(i + 1)) : Value::text(random_text(rng, 4));
    c.input = random_value(rng, 3, false);
    const std::size_t derives = rng() % 3;
    for (std::size_t k = 0; k < derives; ++k) c.derives.push_back(random_value(rng, 2, false));
    c.output = random_value(rng, 3, false);
    p.cases.push_back(std::move(c));
  }
  const std::size_t comments = rng() % 3;
  for (std::size_t i = 0; i < comments; ++i) {
    std::string text = " note";
    text += std::to_string(rng() % 100);
    p.comments.push_back(ZoeaComment{rng() % (cases + 1), text});
  }
  // The printer emits comments grouped by anchor.
  std::stable_sort(p.comments.begin(), p.comments.end(),
                   [](const ZoeaComment& a, const ZoeaComment& b) { return a.anchor < b.anchor; });
  return p;
}

bool strict_same_program(const ZoeaProgram& a, const ZoeaProgram& b, std::string* why) {
  auto fail = [&](const std::string& w) {
    if (why) *why = w;
    return false;
  };
  if (a.name != b.name) return fail("name '" + a.name + "' vs '" + b.name + "'");
  if (a.uses != b.uses) return fail("uses");
  if (a.data.has_value() != b.data.has_value()) return fail("data presence");
  if (a.data && !strict_equal(*a.data, *b.data)) return fail("data " + to_json(*a.data) + " vs " + to_json(*b.data));
  if (a.cases.size() != b.cases.size()) return fail("case count");
  for (std::size_t i = 0; i < a.cases.size(); ++i) {
    const auto& x = a.cases[i];
    const auto& y = b.cases[i];
    if (!strict_equal(x.id, y.id)) return fail("case id " + to_json(x.id) + " vs " + to_json(y.id));
    if (!strict_equal(x.input, y.input)) return fail("input " + to_json(x.input) + " vs " + to_json(y.input));
    if (!strict_equal(x.output, y.output)) return fail("output " + to_json(x.output) + " vs " + to_json(y.output));
    if (x.derives.size() != y.derives.size()) return fail("derive count");
    for (std::size_t k = 0; k < x.derives.size(); ++k) {
      if (!strict_equal(x.derives[k], y.derives[k])) return fail("derive");
    }
  }
  if (a.comments.size() != b.comments.size()) return fail("comment count");
  for (std::size_t i = 0; i < a.comments.size(); ++i) {
    if (a.comments[i].anchor != b.comments[i].anchor || a.comments[i].text != b.comments[i].text) {
      return fail("comment '" + a.comments[i].text + "' vs '" + b.comments[i].text + "'");
    }
  }
  return true;
}

Expr random_expr(Rng& rng, int depth, bool slot_allowed) {
  const auto& cat = catalog_v1();
  const int roll = static_cast<int>(rng() % 20);
  if (depth <= 0 || roll < 6) {
    if (slot_allowed && roll < 2) return Expr::slot();
    if (roll % 2) return Expr::input(rng() % 3);
    return Expr::constant(random_value(rng, 2));
  }
  if (roll < 15) {
    const Primitive& p = cat[rng() % cat.size()];
    std::vector<Expr> args;
    for (std::size_t i = 0; i < p.arity; ++i) args.push_back(random_expr(rng, depth - 1, slot_allowed));
    return Expr::apply(p, std::move(args));
  }
  if (roll < 17) {
    return Expr::if_then_else(random_expr(rng, depth - 1, slot_allowed), random_expr(rng, depth - 1, slot_allowed),
                              random_expr(rng, depth - 1, slot_allowed));
  }
  if (roll < 18) {
    std::vector<Expr> args;
    const std::size_t n = 1 + rng() % 2;
    for (std::size_t i = 0; i < n; ++i) args.push_back(random_expr(rng, depth - 1, slot_allowed));
    return Expr::call("helper" + std::to_string(rng() % 3), std::move(args));
  }
  return Expr::map(random_expr(rng, depth - 1, slot_allowed), random_expr(rng, depth - 1, true));
}

// ---- synthesis oracles ----------------------------------------------------------------

namespace {

void compositions(int budget, int parts, std::vector<int>& prefix, std::vector<std::vector<int>>& out) {
  if (parts == 1) {
    prefix.push_back(budget);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int first = 1; first <= budget - (parts - 1); ++first) {
    prefix.push_back(first);
    compositions(budget - first, parts - 1, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<Expr> enumerate_expressions(std::size_t arity, const std::vector<Value>& constants, int max_cost) {
  std::vector<std::vector<Expr>> by_cost(static_cast<std::size_t>(max_cost) + 1);
  for (std::size_t i = 0; i < arity; ++i) by_cost[1].push_back(Expr::input(i));
  for (const auto& c : constants) by_cost[1].push_back(Expr::constant(c));

  for (int cost = 2; cost <= max_cost; ++cost) {
    for (const Primitive& p : catalog_v1()) {
      const int k = static_cast<int>(p.arity);
      const int budget = cost - p.cost;
      if (k == 0 || budget < k) continue;
      std::vector<std::vector<int>> splits;
      std::vector<int> prefix;
      compositions(budget, k, prefix, splits);
      for (const auto& split : splits) {
        // Odometer over the argument buckets.
        std::vector<std::size_t> idx(k, 0);
        bool empty = false;
        for (int a = 0; a < k; ++a) empty = empty || by_cost[split[a]].empty();
        while (!empty) {
          std::vector<Expr> args;
          for (int a = 0; a < k; ++a) args.push_back(by_cost[split[a]][idx[a]]);
          by_cost[cost].push_back(Expr::apply(p, std::move(args)));
          int a = k - 1;
          while (a >= 0 && ++idx[a] == by_cost[split[a]].size()) idx[a--] = 0;
          if (a < 0) break;
        }
      }
    }
  }
  std::vector<Expr> out;
  for (auto& level : by_cost) out.insert(out.end(), level.begin(), level.end());
  return out;
}

namespace {

bool fits(const Expr& e, const SynthesisProblem& p) {
  for (const auto& c : p.cases) {
    const EvalResult r = eval(e, c.inputs, &p.imports);
    if (!r.ok() || !deep_equal(r.value(), c.output)) return false;
  }
  return true;
}

std::vector<Value> oracle_constants(const SynthesisProblem& p) {
  std::vector<Value> out = p.constants_pool;
  out.push_back(Value::integer(0));
  out.push_back(Value::integer(1));
  out.push_back(Value::text(" "));
  for (const auto& c : p.cases) {
    if (c.output.is_scalar()) out.push_back(c.output);
  }
  std::vector<Value> unique;
  for (const auto& v : out) {
    bool dup = false;
    for (const auto& u : unique) dup = dup || (u.kind() == v.kind() && deep_equal(u, v));
    if (!dup) unique.push_back(v);
  }
  return unique;
}

}  // namespace

std::optional<int> brute_force_min_cost(const SynthesisProblem& p, int max_cost) {
  for (const Expr& e : enumerate_expressions(p.arity, oracle_constants(p), max_cost)) {
    if (fits(e, p)) return e.cost();  // cheapest first
  }
  return std::nullopt;
}

namespace {

Value random_input_of(Rng& rng, int type) {
  static const std::vector<std::string> words = {"apple", "Fig",  "kiwi", "PEAR", "plum", "a b", "x",
                                                 "lemon", "Date", "nut",  "b",    "cc",   "Zed"};
  switch (type) {
    case 0: return Value::integer(static_cast<long long>(rng() % 30) - 8);
    case 1: return Value::text(pick(rng, words));
    case 2: {
      Value::Items xs;
      const std::size_t n = 1 + rng() % 4;
      for (std::size_t i = 0; i < n; ++i) xs.push_back(Value::integer(static_cast<long long>(rng() % 12)));
      return Value::list(xs);
    }
    default: {
      Value::Items xs;
      const std::size_t n = 1 + rng() % 4;
      for (std::size_t i = 0; i < n; ++i) xs.push_back(Value::text(pick(rng, words)));
      return Value::list(xs);
    }
  }
}

/// Random expression of exactly `cost` whose every Apply reads an input.
std::optional<Expr> random_program_of_cost(Rng& rng, int cost, std::size_t arity, const std::vector<Value>& constants,
                                           bool need_input) {
  if (cost == 1) {
    if (need_input || constants.empty() || chance(rng, 60)) return Expr::input(rng() % arity);
    return Expr::constant(pick(rng, constants));
  }
  const auto& cat = catalog_v1();
  for (int attempt = 0; attempt < 20; ++attempt) {
    const Primitive& p = cat[rng() % cat.size()];
    const int k = static_cast<int>(p.arity);
    const int budget = cost - p.cost;
    if (budget < k) continue;
    std::vector<int> parts(k, 1);
    for (int extra = budget - k; extra > 0; --extra) ++parts[rng() % k];
    const int reader = static_cast<int>(rng() % k);
    std::vector<Expr> args;
    bool ok = true;
    for (int a = 0; a < k && ok; ++a) {
      // Compound arguments read an input themselves; one leaf argument must too.
      auto arg = random_program_of_cost(rng, parts[a], arity, constants, parts[a] > 1 || a == reader);
      if (!arg) ok = false; else args.push_back(*arg);
    }
    if (ok) return Expr::apply(p, std::move(args));
  }
  return std::nullopt;
}

}  // namespace

SampledProblem sample_problem(Rng& rng, int max_cost) {
  // The cost is fixed before rejection so that costly programs, which are
  // rejected more often, still get their share.
  const int cost = 1 + static_cast<int>(rng() % max_cost);
  while (true) {
    const std::size_t arity = 1 + rng() % 2;
    std::vector<int> types(arity);
    for (auto& t : types) t = static_cast<int>(rng() % 4);
    std::vector<Value> pool;
    if (chance(rng, 30)) pool.push_back(random_input_of(rng, static_cast<int>(rng() % 2)));
    std::vector<Value> constants = pool;
    constants.insert(constants.end(), base_constants().begin(), base_constants().end());

    auto program = random_program_of_cost(rng, cost, arity, constants, true);
    if (!program) continue;

    SynthesisProblem p;
    p.arity = arity;
    p.constants_pool = pool;
    bool ok = true;
    std::set<std::string> distinct_outputs;
    for (int c = 0; c < 4 && ok; ++c) {
      SynthesisCase sc;
      for (std::size_t i = 0; i < arity; ++i) sc.inputs.push_back(random_input_of(rng, types[i]));
      const EvalResult r = eval(*program, sc.inputs);
      if (!r.ok()) {
        ok = false;
        break;
      }
      sc.output = r.value();
      distinct_outputs.insert(to_json(sc.output));
      p.cases.push_back(std::move(sc));
    }
    if (!ok || distinct_outputs.size() < 2) continue;
    return SampledProblem{std::move(p), *program};
  }
}

// ---- documents ---------------------------------------------------------------------------

namespace {

/// A value generator fixed per identity so every member has the same shape.
Value value_of_shape(Rng& rng, Shape shape) {
  switch (shape) {
    case Shape::Scalar: return chance(rng, 50) ? Value::integer(static_cast<long long>(rng() % 9)) : Value::text(random_text(rng, 3));
    case Shape::List: {
      Value::Items xs;
      const std::size_t n = rng() % 3;
      for (std::size_t i = 0; i < n; ++i) xs.push_back(Value::integer(static_cast<long long>(rng() % 9)));
      return Value::list(xs);
    }
    case Shape::Table: {
      Value::Rows rows(1 + rng() % 2);
      for (auto& r : rows) r = {Value::integer(static_cast<long long>(rng() % 9)), Value::text(random_text(rng, 2))};
      return Value::table(rows);
    }
    case Shape::Object: return Value::object({{"k", Value::integer(static_cast<long long>(rng() % 9))}});
    default: return Value::text(random_text(rng, 6));
  }
}

Shape random_data_shape(Rng& rng) {
  static const std::vector<Shape> shapes = {Shape::Scalar, Shape::Scalar, Shape::List, Shape::Table, Shape::Object};
  return pick(rng, shapes);
}

}  // namespace

Document random_document(Rng& rng) {
  struct Ident {
    IdentityId id;
    ColumnKind kind;
    std::size_t column;  // physical column index
    Shape shape;
    std::vector<std::optional<Value>> values;  // per case; nullopt = element absent
  };

  Document d;
  d.name = "doc" + std::to_string(rng() % 1000);
  const std::size_t cases = 1 + rng() % 4;
  const std::size_t derive_columns = rng() % 3;
  const std::size_t output_column = 2 + derive_columns;
  IdentityId next_identity = 1;
  std::vector<Ident> idents;

  auto add_ident = [&](ColumnKind kind, std::size_t column, bool needs_value) {
    Ident id{next_identity++, kind, column, random_data_shape(rng), std::vector<std::optional<Value>>(cases)};
    const Value data_value = value_of_shape(rng, id.shape);
    bool any_value = false;
    for (std::size_t c = 0; c < cases; ++c) {
      if (chance(rng, 15)) continue;  // absent in this case
      if (chance(rng, 20)) {
        id.values[c] = empty_for(id.shape);
        continue;
      }
      id.values[c] = kind == ColumnKind::Data ? data_value : value_of_shape(rng, id.shape);
      any_value = true;
    }
    if (!any_value && (needs_value || kind == ColumnKind::Data)) {
      const std::size_t c = rng() % cases;
      id.values[c] = kind == ColumnKind::Data ? data_value : value_of_shape(rng, id.shape);
    }
    idents.push_back(std::move(id));
  };

  const std::size_t data_count = rng() % 3;
  for (std::size_t i = 0; i < data_count; ++i) add_ident(ColumnKind::Data, 0, true);
  const std::size_t input_count = 1 + rng() % 3;
  for (std::size_t i = 0; i < input_count; ++i) add_ident(ColumnKind::Input, 1, false);
  for (std::size_t col = 0; col < derive_columns; ++col) {
    const std::size_t n = 1 + rng() % 2;
    for (std::size_t i = 0; i < n; ++i) add_ident(ColumnKind::Derive, 2 + col, true);
  }
  const std::size_t output_count = 1 + rng() % 2;
  for (std::size_t i = 0; i < output_count; ++i) add_ident(ColumnKind::Output, output_column, true);

  auto has_value = [](const Ident& x, std::size_t c) { return x.values[c] && !x.values[c]->is_empty_marker(); };

  // Identity-level source sets, chosen so every source has a value wherever
  // its target does.
  std::map<IdentityId, std::vector<IdentityId>> chosen;
  for (const auto& t : idents) {
    if (t.kind != ColumnKind::Derive && t.kind != ColumnKind::Output) continue;
    if (!chance(rng, 65)) continue;
    std::vector<IdentityId> sources;
    for (const auto& s : idents) {
      if (s.column >= t.column) continue;
      bool eligible = true;
      if (s.kind != ColumnKind::Data) {
        for (std::size_t c = 0; c < cases; ++c) {
          if (has_value(t, c) && !has_value(s, c)) eligible = false;
        }
      }
      if (eligible && chance(rng, 50)) sources.push_back(s.id);
    }
    if (!sources.empty()) chosen[t.id] = sources;
  }

  ElementId next_element = 1;
  for (std::size_t c = 0; c < cases; ++c) {
    CaseDiagram cd;
    cd.id = c == 2 && chance(rng, 50) ? "case-c" : std::to_string(c + 1);
    std::map<IdentityId, ElementId> element_of;
    for (std::size_t col = 0; col <= output_column; ++col) {
      Column column;
      column.kind = col == 0 ? ColumnKind::Data
                    : col == 1 ? ColumnKind::Input
                    : col == output_column ? ColumnKind::Output
                                           : ColumnKind::Derive;
      column.offset = static_cast<int>(rng() % 3);
      std::vector<const Ident*> here;
      for (const auto& x : idents) {
        if (x.column == col && x.values[c]) here.push_back(&x);
      }
      std::shuffle(here.begin(), here.end(), rng);
      for (const Ident* x : here) {
        const ElementId e = next_element++;
        element_of[x->id] = e;
        column.elements.push_back(Element{e, x->id, x->shape, *x->values[c], std::nullopt});
      }
      const bool labelled_column = column.kind == ColumnKind::Input || column.kind == ColumnKind::Output;
      if (labelled_column && !column.elements.empty() && chance(rng, 40)) {
        const ElementId target = column.elements[rng() % column.elements.size()].id;
        column.elements.push_back(
            Element{next_element++, next_identity++, Shape::Label, Value::text("label " + random_text(rng, 3)), target});
      }
      if (chance(rng, 20)) {
        column.elements.insert(column.elements.begin(), Element{next_element++, next_identity++, Shape::Comment,
                                                                Value::text("comment " + random_text(rng, 4)),
                                                                std::nullopt});
      }
      cd.columns.push_back(std::move(column));
    }
    for (const auto& [target, sources] : chosen) {
      auto te = element_of.find(target);
      if (te == element_of.end()) continue;
      Dependency dep;
      dep.target = te->second;
      for (IdentityId s : sources) {
        auto se = element_of.find(s);
        if (se != element_of.end()) dep.sources.push_back(se->second);
      }
      if (!dep.sources.empty()) cd.dependencies.push_back(std::move(dep));
    }
    d.cases.push_back(std::move(cd));
  }
  d.next_element = next_element;
  d.next_identity = next_identity;

  for (const auto& x : idents) {
    if (x.kind == ColumnKind::Data && chance(rng, 30)) d.runtime[x.id] = value_of_shape(rng, x.shape);
  }
  return d;
}

std::string synthetic_cases_oracle(const std::string& document_json, bool use_dependencies) {
  const Json doc = Json::parse(document_json);
  const Json& cases = doc.at("cases");
  const std::size_t n = cases.size();
  const std::size_t kOutputColumn = static_cast<std::size_t>(-1);

  struct Info {
    std::string kind;
    std::size_t column = 0;
    std::tuple<std::size_t, std::size_t, std::size_t> first{};
    std::vector<std::optional<Json>> values;
  };
  std::map<std::uint64_t, Info> info;
  std::map<std::uint64_t, std::uint64_t> identity_of_element;

  for (std::size_t ci = 0; ci < n; ++ci) {
    const Json& columns = cases[ci].at("columns");
    for (std::size_t col = 0; col < columns.size(); ++col) {
      const std::string kind = columns[col].at("kind").get<std::string>();
      const std::size_t logical = kind == "data" ? 0 : kind == "input" ? 1 : kind == "output" ? kOutputColumn : 1 + col;
      std::size_t row = 0;
      for (const Json& e : columns[col].at("elements")) {
        identity_of_element[e.at("id").get<std::uint64_t>()] = e.at("identity").get<std::uint64_t>();
        const std::string shape = e.at("shape").get<std::string>();
        if (shape == "comment" || shape == "label") continue;
        const auto identity = e.at("identity").get<std::uint64_t>();
        auto [it, fresh] = info.try_emplace(identity);
        if (fresh) {
          it->second.kind = kind;
          it->second.column = logical;
          it->second.first = {logical, ci, row};
          it->second.values.resize(n);
        }
        if (e.contains("value")) it->second.values[ci] = e.at("value");
        ++row;
      }
    }
  }

  std::vector<std::uint64_t> order;
  for (const auto& [id, in] : info) order.push_back(id);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint64_t a, std::uint64_t b) { return info[a].first < info[b].first; });
  std::map<std::uint64_t, std::size_t> rank;
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

  std::map<std::uint64_t, std::set<std::uint64_t>> drawn;
  if (use_dependencies) {
    for (const Json& c : cases) {
      for (const Json& dep : c.at("dependencies")) {
        auto& set = drawn[identity_of_element.at(dep.at("target").get<std::uint64_t>())];
        for (const Json& s : dep.at("sources")) set.insert(identity_of_element.at(s.get<std::uint64_t>()));
      }
    }
  }

  auto data_value = [&](std::uint64_t id) -> Json {
    for (const auto& v : info[id].values) {
      if (v) return *v;
    }
    return nullptr;
  };

  Json out = Json::array();
  for (std::uint64_t target : order) {
    const Info& t = info[target];
    if (t.kind != "derive" && t.kind != "output") continue;
    std::vector<std::uint64_t> sources;
    if (drawn.count(target)) {
      std::set<std::uint64_t> s = drawn[target];
      for (std::uint64_t id : order) {
        if (info[id].kind == "data") s.insert(id);
      }
      sources.assign(s.begin(), s.end());
    } else {
      for (std::uint64_t id : order) {
        const Info& s = info[id];
        if (s.column >= t.column) continue;
        bool usable = true;
        if (s.kind != "data") {
          for (std::size_t ci = 0; ci < n; ++ci) {
            if (t.values[ci] && !s.values[ci]) usable = false;
          }
        }
        if (usable) sources.push_back(id);
      }
    }
    std::sort(sources.begin(), sources.end(), [&](auto a, auto b) { return rank[a] < rank[b]; });

    Json sc = Json::object();
    sc["target"] = target;
    sc["sources"] = sources;
    Json indices = Json::array();
    Json rows = Json::array();
    for (std::size_t ci = 0; ci < n; ++ci) {
      if (!t.values[ci]) continue;
      Json inputs = Json::array();
      bool complete = true;
      for (std::uint64_t s : sources) {
        if (info[s].kind == "data") {
          inputs.push_back(data_value(s));
        } else if (info[s].values[ci]) {
          inputs.push_back(*info[s].values[ci]);
        } else {
          complete = false;
        }
      }
      if (!complete) continue;
      indices.push_back(ci);
      rows.push_back(Json{{"inputs", inputs}, {"output", *t.values[ci]}});
    }
    sc["case_indices"] = indices;
    sc["rows"] = rows;
    out.push_back(sc);
  }
  return out.dump();
}

std::string synthetic_cases_json(const std::vector<SyntheticCase>& cases) {
  Json out = Json::array();
  for (const auto& sc : cases) {
    Json rows = Json::array();
    for (const auto& r : sc.rows) {
      Json inputs = Json::array();
      for (const auto& v : r.inputs) inputs.push_back(to_njson(v));
      rows.push_back(Json{{"inputs", inputs}, {"output", to_njson(r.output)}});
    }
    out.push_back(Json{{"target", sc.target}, {"sources", sc.sources}, {"case_indices", sc.case_indices}, {"rows", rows}});
  }
  return out.dump();
}

Document chain_document(const std::vector<std::pair<Value, std::pair<Value, Value>>>& rows) {
  ZoeaProgram p;
  p.name = "chain";
  long long id = 1;
  for (const auto& [in, rest] : rows) {
    p.cases.push_back(ZoeaCase{Value::integer(id++), in, {rest.first}, rest.second});
  }
  return import_zoea(p, ImportMode::Steps);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace zt
