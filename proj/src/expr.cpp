#include "zoea/expr.hpp"

#include <algorithm>

#include "zoea/catalog.hpp"

namespace zoea {

Expr Expr::make(Node node) {
  int cost = (node.kind == ExprKind::If || node.kind == ExprKind::Map) ? 2 : 1;
  for (const auto& a : node.args) cost += a.cost();
  node.cost = cost;
  return Expr(std::make_shared<const Node>(std::move(node)));
}

Expr Expr::input(std::size_t index) {
  Node n{ExprKind::Input};
  n.index = index;
  return make(std::move(n));
}

Expr Expr::constant(Value v) {
  Node n{ExprKind::Const};
  n.constant = std::move(v);
  return make(std::move(n));
}

Expr Expr::apply(const Primitive& prim, std::vector<Expr> args) {
  Node n{ExprKind::Apply};
  n.prim = &prim;
  n.args = std::move(args);
  return make(std::move(n));
}

Expr Expr::if_then_else(Expr predicate, Expr then_branch, Expr else_branch) {
  Node n{ExprKind::If};
  n.args = {std::move(predicate), std::move(then_branch), std::move(else_branch)};
  return make(std::move(n));
}

Expr Expr::call(std::string program, std::vector<Expr> args) {
  Node n{ExprKind::Call};
  n.name = std::move(program);
  n.args = std::move(args);
  return make(std::move(n));
}

Expr Expr::map(Expr list, Expr body) {
  Node n{ExprKind::Map};
  n.args = {std::move(list), std::move(body)};
  return make(std::move(n));
}

Expr Expr::slot() { return make(Node{ExprKind::Slot}); }

std::size_t Expr::arity_needed() const noexcept {
  std::size_t n = kind() == ExprKind::Input ? input_index() + 1 : 0;
  for (const auto& a : args()) n = std::max(n, a.arity_needed());
  return n;
}

namespace {

bool bare_name(std::string_view name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return c != '(' && c != ')' && c != '"' && c != ' ' && c != '\t' && c != '\n' && c != '\r';
  });
}

}  // namespace

void append_serialization(std::string& out, const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Input:
      out += "(in ";
      out += std::to_string(e.input_index());
      out += ')';
      return;
    case ExprKind::Const:
      out += "(const ";
      out += to_json(e.constant_value());
      out += ')';
      return;
    case ExprKind::Slot:
      out += "(slot)";
      return;
    case ExprKind::Apply:
      out += '(';
      out += e.primitive().name;
      break;
    case ExprKind::If:
      out += "(if";
      break;
    case ExprKind::Call:
      out += "(call ";
      out += bare_name(e.program()) ? e.program() : quote_json(e.program());
      break;
    case ExprKind::Map:
      out += "(map";
      break;
  }
  for (const auto& a : e.args()) {
    out += ' ';
    append_serialization(out, a);
  }
  out += ')';
}

std::string canonical_serialization(const Expr& e) {
  std::string out;
  append_serialization(out, e);
  return out;
}

namespace {

class ExprReader {
 public:
  explicit ExprReader(std::string_view src) : src_(src) {}

  Expr parse_all() {
    Expr e = parse(0);
    skip();
    if (pos_ != src_.size()) throw ExprParseError("trailing characters", pos_);
    return e;
  }

 private:
  void skip() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\n' || src_[pos_] == '\t' || src_[pos_] == '\r'))
      ++pos_;
  }

  void expect(char c) {
    skip();
    if (pos_ >= src_.size() || src_[pos_] != c) throw ExprParseError(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }

  std::string word() {
    skip();
    if (pos_ < src_.size() && src_[pos_] == '"') {
      ValueReader r(src_, false, pos_);
      Value v = r.read();
      pos_ = r.position();
      return v.as_text();
    }
    const std::size_t start = pos_;
    while (pos_ < src_.size() && src_[pos_] != ' ' && src_[pos_] != '(' && src_[pos_] != ')' && src_[pos_] != '\n' &&
           src_[pos_] != '\t' && src_[pos_] != '\r')
      ++pos_;
    if (pos_ == start) throw ExprParseError("expected a name", pos_);
    return std::string(src_.substr(start, pos_ - start));
  }

  std::vector<Expr> rest(int depth) {
    std::vector<Expr> args;
    while (true) {
      skip();
      if (pos_ >= src_.size()) throw ExprParseError("unterminated expression", pos_);
      if (src_[pos_] == ')') {
        ++pos_;
        return args;
      }
      args.push_back(parse(depth + 1));
    }
  }

  Expr parse(int depth) {
    if (depth > 512) throw ExprParseError("expression nested too deeply", pos_);
    expect('(');
    const std::size_t head_pos = pos_;
    const std::string head = word();
    if (head == "in") {
      skip();
      const std::size_t start = pos_;
      while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') ++pos_;
      if (pos_ == start) throw ExprParseError("expected input index", pos_);
      const auto index = std::stoull(std::string(src_.substr(start, pos_ - start)));
      expect(')');
      return Expr::input(index);
    }
    if (head == "const") {
      skip();
      ValueReader r(src_, false, pos_);
      Value v;
      try {
        v = r.read();
      } catch (const ValueError& e) {
        throw ExprParseError(std::string("bad constant: ") + e.what(), e.position());
      }
      pos_ = r.position();
      expect(')');
      return Expr::constant(std::move(v));
    }
    if (head == "slot") {
      expect(')');
      return Expr::slot();
    }
    if (head == "if") {
      auto args = rest(depth);
      if (args.size() != 3) throw ExprParseError("if takes 3 arguments", head_pos);
      return Expr::if_then_else(args[0], args[1], args[2]);
    }
    if (head == "map") {
      auto args = rest(depth);
      if (args.size() != 2) throw ExprParseError("map takes 2 arguments", head_pos);
      return Expr::map(args[0], args[1]);
    }
    if (head == "call") {
      std::string name = word();
      return Expr::call(std::move(name), rest(depth));
    }
    const Primitive* prim = find_primitive(head);
    if (!prim) throw ExprParseError("unknown primitive '" + head + "'", head_pos);
    auto args = rest(depth);
    if (args.size() != prim->arity) throw ExprParseError("wrong argument count for '" + head + "'", head_pos);
    return Expr::apply(*prim, std::move(args));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text) { return ExprReader(text).parse_all(); }

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind() != b.kind() || a.args().size() != b.args().size()) return false;
  switch (a.kind()) {
    case ExprKind::Input:
      if (a.input_index() != b.input_index()) return false;
      break;
    case ExprKind::Const:
      if (!deep_equal(a.constant_value(), b.constant_value())) return false;
      break;
    case ExprKind::Apply:
      if (&a.primitive() != &b.primitive()) return false;
      break;
    case ExprKind::Call:
      if (a.program() != b.program()) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.args().size(); ++i) {
    if (!structurally_equal(a.args()[i], b.args()[i])) return false;
  }
  return true;
}

}  // namespace zoea
