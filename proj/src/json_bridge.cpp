#include "zoea/json_bridge.hpp"

namespace zoea {

Json to_njson(const Value& v) {
  switch (v.kind()) {
    case ValueKind::Null: return nullptr;
    case ValueKind::Boolean: return v.as_bool();
    case ValueKind::Number: {
      const Number& n = v.as_number();
      if (n.is_integer() && std::abs(n.value()) < 9.0e15) return static_cast<long long>(n.value());
      return n.value();
    }
    case ValueKind::Text: return v.as_text();
    case ValueKind::List: {
      Json arr = Json::array();
      for (const auto& item : v.items()) arr.push_back(to_njson(item));
      return arr;
    }
    case ValueKind::Table: {
      Json arr = Json::array();
      for (const auto& row : v.rows()) {
        Json r = Json::array();
        for (const auto& cell : row) r.push_back(to_njson(cell));
        arr.push_back(std::move(r));
      }
      return arr;
    }
    case ValueKind::Object: {
      Json obj = Json::object();
      for (const auto& [k, val] : v.entries()) obj[k] = to_njson(val);
      return obj;
    }
    case ValueKind::Empty: break;
  }
  throw ValueError(ValueError::Code::EmptyPresent, "empty placeholder has no JSON form");
}

Value from_njson(const Json& j, std::optional<ValueKind> hint) {
  switch (j.type()) {
    case Json::value_t::null: return Value::null();
    case Json::value_t::boolean: return Value::boolean(j.get<bool>());
    case Json::value_t::number_integer:
    case Json::value_t::number_unsigned:
    case Json::value_t::number_float: {
      auto n = Number::parse(j.dump());
      if (!n) throw ValueError(ValueError::Code::ParseError, "unrepresentable number " + j.dump());
      return Value::number(*n);
    }
    case Json::value_t::string: return Value::text(j.get<std::string>());
    case Json::value_t::array: {
      if (hint == ValueKind::Table) {
        Value::Rows rows;
        for (const auto& r : j) {
          if (!r.is_array()) throw ValueError(ValueError::Code::ShapeError, "table row is not an array");
          Value::Row row;
          for (const auto& cell : r) row.push_back(from_njson(cell));
          rows.push_back(std::move(row));
        }
        return Value::table(std::move(rows));
      }
      Value::Items items;
      for (const auto& item : j) items.push_back(from_njson(item));
      return Value::list(std::move(items));
    }
    case Json::value_t::object: {
      Value::Entries entries;
      for (auto it = j.begin(); it != j.end(); ++it) entries.emplace_back(it.key(), from_njson(it.value()));
      return Value::object(std::move(entries));
    }
    default: break;
  }
  throw ValueError(ValueError::Code::ParseError, "unsupported JSON value");
}

}  // namespace zoea
