#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "zoea/value.hpp"

namespace zoea {

struct Primitive;

enum class ExprKind { Input, Const, Apply, If, Call, Map, Slot };

/// Immutable expression tree over the primitive catalog. Nodes are shared,
/// so sub-expressions can be reused by many candidates during search.
class Expr {
 public:
  static Expr input(std::size_t index);
  static Expr constant(Value v);
  static Expr apply(const Primitive& prim, std::vector<Expr> args);
  static Expr if_then_else(Expr predicate, Expr then_branch, Expr else_branch);
  static Expr call(std::string program, std::vector<Expr> args);
  /// Applies `body` to every item of `list`; `slot()` inside body names the item.
  static Expr map(Expr list, Expr body);
  static Expr slot();

  ExprKind kind() const noexcept { return node_->kind; }
  std::size_t input_index() const noexcept { return node_->index; }
  const Value& constant_value() const noexcept { return node_->constant; }
  const Primitive& primitive() const noexcept { return *node_->prim; }
  const std::string& program() const noexcept { return node_->name; }
  const std::vector<Expr>& args() const noexcept { return node_->args; }

  /// Node count with If and Map weighted 2.
  int cost() const noexcept { return node_->cost; }
  /// Largest InputRef index + 1 (0 when the expression reads no input).
  std::size_t arity_needed() const noexcept;

 private:
  struct Node {
    ExprKind kind = ExprKind::Input;
    std::size_t index = 0;
    Value constant{};
    const Primitive* prim = nullptr;
    std::string name{};
    std::vector<Expr> args{};
    int cost = 1;
  };

  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Expr make(Node node);

  std::shared_ptr<const Node> node_;
};

/// Stable, injective text form, e.g. `(add (in 0) (const 1))`.
std::string canonical_serialization(const Expr& e);
void append_serialization(std::string& out, const Expr& e);

class ExprParseError : public std::runtime_error {
 public:
  ExprParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at offset " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Inverse of canonical_serialization.
Expr parse_expr(std::string_view text);

bool structurally_equal(const Expr& a, const Expr& b);

}  // namespace zoea
