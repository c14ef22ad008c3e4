#pragma once

#include <optional>

#include <json.hpp>

#include "zoea/value.hpp"

namespace zoea {

using Json = nlohmann::ordered_json;

/// Throws ValueError(EmptyPresent) for empty markers. Numbers lose their
/// lexical form (integers stay integers).
Json to_njson(const Value& v);

/// `hint` = Table reads a rectangular array of arrays as a Table.
Value from_njson(const Json& j, std::optional<ValueKind> hint = std::nullopt);

}  // namespace zoea
