#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>

#include "zoea/catalog.hpp"
#include "zoea/expr.hpp"
#include "zoea/value.hpp"

namespace zoea {

/// A previously compiled program offered to search and evaluation by name.
struct Import {
  std::string name;
  std::size_t arity = 1;
  std::function<EvalResult(std::span<const Value>)> call;
};

using ImportTable = std::map<std::string, Import, std::less<>>;

/// Evaluates `e` against one case's inputs. Never throws for well-formed
/// expressions; failures come back as EvalError with the path to the node.
EvalResult eval(const Expr& e, std::span<const Value> inputs, const ImportTable* imports = nullptr);

/// As eval, with the Map slot bound to `slot`.
EvalResult eval_with_slot(const Expr& e, std::span<const Value> inputs, const Value& slot,
                          const ImportTable* imports = nullptr);

}  // namespace zoea
