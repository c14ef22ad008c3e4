#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "zoea/value.hpp"

namespace zoea {

/// Bit set of value kinds, used for primitive signatures.
using KindMask = unsigned;

namespace kinds {
constexpr KindMask kNull = 1u << 0;
constexpr KindMask kBoolean = 1u << 1;
constexpr KindMask kNumber = 1u << 2;
constexpr KindMask kText = 1u << 3;
constexpr KindMask kList = 1u << 4;
constexpr KindMask kTable = 1u << 5;
constexpr KindMask kObject = 1u << 6;
constexpr KindMask kSequence = kList | kTable;
constexpr KindMask kScalar = kNull | kBoolean | kNumber | kText;
constexpr KindMask kAny = kScalar | kSequence | kObject;

KindMask of(const Value& v) noexcept;
}  // namespace kinds

enum class EvalErrorKind {
  TypeMismatch,
  DivByZero,
  IndexOutOfRange,
  KeyNotFound,
  InvalidArgument,
  NonFinite,
  ArityMismatch,
  UnknownImport,
  UnboundSlot,
  InputOutOfRange,
  ImportFailed,
};

std::string_view to_string(EvalErrorKind kind);

struct EvalError {
  EvalErrorKind kind = EvalErrorKind::TypeMismatch;
  std::string_view detail;  // static text
  /// Child indices from the root to the failing node.
  std::vector<std::size_t> path;
};

/// A Value or the error that stopped evaluation. Errors are ordinary results:
/// the search uses them to prune candidates.
class EvalResult {
 public:
  EvalResult(Value v) : data_(std::move(v)) {}                // NOLINT(google-explicit-constructor)
  EvalResult(EvalError e) : data_(std::move(e)) {}            // NOLINT(google-explicit-constructor)

  bool ok() const noexcept { return data_.index() == 0; }
  const Value& value() const { return std::get<Value>(data_); }
  Value& value() { return std::get<Value>(data_); }
  const EvalError& error() const { return std::get<EvalError>(data_); }
  EvalError& error() { return std::get<EvalError>(data_); }

 private:
  std::variant<Value, EvalError> data_;
};

/// Arguments are passed by pointer so the search can evaluate without copying.
using PrimitiveArgs = std::span<const Value* const>;

struct Primitive {
  std::string_view name;
  std::string_view category;
  std::size_t arity;
  std::array<KindMask, 3> arg_kinds;
  KindMask result_kinds;
  EvalResult (*apply)(PrimitiveArgs args);
  int cost = 1;
};

inline constexpr std::string_view kCatalogVersion = "zoea-catalog/1";

/// The v1 primitive catalog, in its fixed search order.
const std::vector<Primitive>& catalog_v1();
const Primitive* find_primitive(std::string_view name);

/// Checks the argument count and kinds against the signature, then applies.
EvalResult call_primitive(const Primitive& prim, PrimitiveArgs args);

}  // namespace zoea
