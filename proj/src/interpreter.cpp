#include "zoea/interpreter.hpp"

#include <array>
#include <vector>

namespace zoea {

namespace {

struct Frame {
  std::span<const Value> inputs;
  const Value* slot;
  const ImportTable* imports;
};

EvalError error_at(EvalErrorKind kind, std::string_view detail) { return EvalError{kind, detail, {}}; }

EvalResult with_path(EvalResult r, std::size_t child) {
  if (!r.ok()) r.error().path.insert(r.error().path.begin(), child);
  return r;
}

EvalResult run(const Expr& e, const Frame& f, int depth);

// Evaluates all arguments eagerly, stopping at the first error.
bool run_args(const Expr& e, const Frame& f, int depth, std::vector<Value>& out, EvalResult& failure) {
  out.reserve(e.args().size());
  for (std::size_t i = 0; i < e.args().size(); ++i) {
    EvalResult r = run(e.args()[i], f, depth + 1);
    if (!r.ok()) {
      failure = with_path(std::move(r), i);
      return false;
    }
    out.push_back(std::move(r.value()));
  }
  return true;
}

EvalResult run(const Expr& e, const Frame& f, int depth) {
  if (depth > 1000) return error_at(EvalErrorKind::InvalidArgument, "expression nested too deeply");
  switch (e.kind()) {
    case ExprKind::Input:
      if (e.input_index() >= f.inputs.size()) return error_at(EvalErrorKind::InputOutOfRange, "input index out of range");
      return f.inputs[e.input_index()];
    case ExprKind::Const:
      return e.constant_value();
    case ExprKind::Slot:
      if (!f.slot) return error_at(EvalErrorKind::UnboundSlot, "slot used outside map");
      return *f.slot;
    case ExprKind::Apply: {
      std::vector<Value> values;
      EvalResult failure = Value();
      if (!run_args(e, f, depth, values, failure)) return failure;
      std::array<const Value*, 3> ptrs{};
      if (values.size() > ptrs.size()) return error_at(EvalErrorKind::ArityMismatch, "too many arguments");
      for (std::size_t i = 0; i < values.size(); ++i) ptrs[i] = &values[i];
      return call_primitive(e.primitive(), PrimitiveArgs(ptrs.data(), values.size()));
    }
    case ExprKind::If: {
      EvalResult p = run(e.args()[0], f, depth + 1);
      if (!p.ok()) return with_path(std::move(p), 0);
      if (p.value().kind() != ValueKind::Boolean) {
        return with_path(error_at(EvalErrorKind::TypeMismatch, "if predicate is not boolean"), 0);
      }
      const std::size_t branch = p.value().as_bool() ? 1 : 2;
      return with_path(run(e.args()[branch], f, depth + 1), branch);
    }
    case ExprKind::Call: {
      if (!f.imports) return error_at(EvalErrorKind::UnknownImport, "no imports available");
      auto it = f.imports->find(e.program());
      if (it == f.imports->end()) return error_at(EvalErrorKind::UnknownImport, "unknown imported program");
      if (it->second.arity != e.args().size()) return error_at(EvalErrorKind::ArityMismatch, "import arity mismatch");
      std::vector<Value> values;
      EvalResult failure = Value();
      if (!run_args(e, f, depth, values, failure)) return failure;
      return it->second.call(values);
    }
    case ExprKind::Map: {
      EvalResult list = run(e.args()[0], f, depth + 1);
      if (!list.ok()) return with_path(std::move(list), 0);
      if (!list.value().is_sequence()) return with_path(error_at(EvalErrorKind::TypeMismatch, "map needs a list"), 0);
      Value::Items out;
      for (const auto& item : list.value().sequence_items()) {
        Frame inner{f.inputs, &item, f.imports};
        EvalResult r = run(e.args()[1], inner, depth + 1);
        if (!r.ok()) return with_path(std::move(r), 1);
        out.push_back(std::move(r.value()));
      }
      return Value::list(std::move(out));
    }
  }
  return error_at(EvalErrorKind::InvalidArgument, "unknown expression kind");
}

}  // namespace

EvalResult eval(const Expr& e, std::span<const Value> inputs, const ImportTable* imports) {
  return run(e, Frame{inputs, nullptr, imports}, 0);
}

EvalResult eval_with_slot(const Expr& e, std::span<const Value> inputs, const Value& slot, const ImportTable* imports) {
  return run(e, Frame{inputs, &slot, imports}, 0);
}

}  // namespace zoea
