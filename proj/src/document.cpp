#include "zoea/document.hpp"

#include <algorithm>
#include <limits>

#include "zoea/json_bridge.hpp"

namespace zoea {

std::string_view to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::Data: return "data";
    case ColumnKind::Input: return "input";
    case ColumnKind::Derive: return "derive";
    case ColumnKind::Output: return "output";
  }
  return "?";
}

std::string_view to_string(Shape shape) {
  switch (shape) {
    case Shape::Scalar: return "scalar";
    case Shape::List: return "list";
    case Shape::Table: return "table";
    case Shape::Object: return "object";
    case Shape::Comment: return "comment";
    case Shape::Label: return "label";
  }
  return "?";
}

std::optional<ColumnKind> column_kind_from_string(std::string_view s) {
  for (auto k : {ColumnKind::Data, ColumnKind::Input, ColumnKind::Derive, ColumnKind::Output}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::optional<Shape> shape_from_string(std::string_view s) {
  for (auto k : {Shape::Scalar, Shape::List, Shape::Table, Shape::Object, Shape::Comment, Shape::Label}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::string_view to_string(DocumentError::Code code) {
  using C = DocumentError::Code;
  switch (code) {
    case C::UnknownCase: return "UnknownCase";
    case C::UnknownElement: return "UnknownElement";
    case C::UnknownIdentity: return "UnknownIdentity";
    case C::SameCaseConflict: return "SameCaseConflict";
    case C::ShapeMismatch: return "ShapeMismatch";
    case C::NotProperSubset: return "NotProperSubset";
    case C::ValidationFailed: return "ValidationFailed";
    case C::EmptyValue: return "EmptyValue";
    case C::NotDataElement: return "NotDataElement";
    case C::FormatError: return "FormatError";
    case C::UnsupportedVersion: return "UnsupportedVersion";
  }
  return "?";
}

Shape shape_of(const Value& v) {
  switch (v.kind()) {
    case ValueKind::List: return Shape::List;
    case ValueKind::Table: return Shape::Table;
    case ValueKind::Object: return Shape::Object;
    case ValueKind::Empty:
      switch (v.empty_kind()) {
        case EmptyKind::List: return Shape::List;
        case EmptyKind::Table: return Shape::Table;
        case EmptyKind::Object: return Shape::Object;
        case EmptyKind::Scalar: return Shape::Scalar;
      }
      return Shape::Scalar;
    default: return Shape::Scalar;
  }
}

Value empty_for(Shape shape) {
  switch (shape) {
    case Shape::List: return Value::empty(EmptyKind::List);
    case Shape::Table: return Value::empty(EmptyKind::Table);
    case Shape::Object: return Value::empty(EmptyKind::Object);
    default: return Value::empty(EmptyKind::Scalar);
  }
}

bool is_annotation(Shape shape) { return shape == Shape::Comment || shape == Shape::Label; }

namespace {

bool fits_shape(const Value& v, Shape shape) {
  if (is_annotation(shape)) return v.kind() == ValueKind::Text;
  return shape_of(v) == shape;
}

/// Logical column position shared across cases: output is always last even
/// when cases have different numbers of derive columns.
std::size_t logical_column(const CaseDiagram& c, std::size_t column) {
  switch (c.columns[column].kind) {
    case ColumnKind::Data: return 0;
    case ColumnKind::Input: return 1;
    case ColumnKind::Derive: return 1 + column;
    case ColumnKind::Output: return std::numeric_limits<std::size_t>::max();
  }
  return column;
}

std::string where(const CaseDiagram& c, std::optional<ElementId> e = std::nullopt) {
  std::string out = "case " + c.id;
  if (e) out += ", element " + std::to_string(*e);
  return out;
}

Element* find_mut(Document& d, ElementId id) {
  for (auto& c : d.cases)
    for (auto& col : c.columns)
      for (auto& e : col.elements)
        if (e.id == id) return &e;
  return nullptr;
}

bool well_formed_columns(const CaseDiagram& c) {
  if (c.columns.size() < 3) return false;
  if (c.columns.front().kind != ColumnKind::Data || c.columns[1].kind != ColumnKind::Input) return false;
  if (c.columns.back().kind != ColumnKind::Output) return false;
  for (std::size_t i = 2; i + 1 < c.columns.size(); ++i) {
    if (c.columns[i].kind != ColumnKind::Derive) return false;
  }
  return true;
}

std::string case_id_text(const Value& id) {
  if (id.kind() == ValueKind::Text) return id.as_text();
  if (id.kind() == ValueKind::Number) return id.as_number().lexical();
  return to_json(id);
}

}  // namespace

std::optional<ElementRef> locate(const Document& d, ElementId id) {
  for (std::size_t ci = 0; ci < d.cases.size(); ++ci) {
    const auto& c = d.cases[ci];
    for (std::size_t col = 0; col < c.columns.size(); ++col) {
      const auto& els = c.columns[col].elements;
      for (std::size_t r = 0; r < els.size(); ++r) {
        if (els[r].id == id) return ElementRef{ci, col, r};
      }
    }
  }
  return std::nullopt;
}

const Element& element_at(const Document& d, const ElementRef& ref) {
  return d.cases.at(ref.case_index).columns.at(ref.column).elements.at(ref.row);
}

std::map<IdentityId, std::vector<ElementId>> identity_classes(const Document& d) {
  std::map<IdentityId, std::vector<ElementId>> out;
  for (const auto& c : d.cases)
    for (const auto& col : c.columns)
      for (const auto& e : col.elements) out[e.identity].push_back(e.id);
  return out;
}

std::map<IdentityId, IdentityInfo> identity_info(const Document& d) {
  std::map<IdentityId, IdentityInfo> out;
  for (const auto& c : d.cases) {
    if (!well_formed_columns(c)) continue;
    for (std::size_t col = 0; col < c.columns.size(); ++col) {
      for (const auto& e : c.columns[col].elements) {
        out.try_emplace(e.identity, IdentityInfo{c.columns[col].kind, logical_column(c, col), e.shape});
      }
    }
  }
  return out;
}

std::optional<Value> data_test_value(const Document& d, IdentityId identity) {
  for (const auto& c : d.cases) {
    if (c.columns.empty() || c.columns.front().kind != ColumnKind::Data) continue;
    for (const auto& e : c.columns.front().elements) {
      if (e.identity == identity && !is_annotation(e.shape) && !e.value.is_empty_marker()) return e.value;
    }
  }
  return std::nullopt;
}

std::optional<Value> data_runtime_value(const Document& d, IdentityId identity) {
  auto it = d.runtime.find(identity);
  if (it != d.runtime.end()) return it->second;
  return data_test_value(d, identity);
}

std::vector<Diagnostic> validate_document(const Document& d) {
  std::vector<Diagnostic> out;
  auto error = [&](std::string code, std::string message, std::string at = {}) {
    out.push_back(Diagnostic{Severity::Error, std::move(code), std::move(message), std::move(at)});
  };

  if (d.name.empty()) error("InvalidName", "program name is empty");
  {
    std::set<std::string> seen;
    for (const auto& u : d.uses) {
      if (!seen.insert(u).second) error("DuplicateUse", "program '" + u + "' is used twice");
      if (u == d.name) error("SelfUse", "a program cannot use itself");
    }
  }
  if (d.cases.empty()) {
    error("NoCases", "document has no cases");
    return out;
  }

  std::set<std::string> case_ids;
  std::set<ElementId> element_ids;
  for (const auto& c : d.cases) {
    if (!case_ids.insert(c.id).second) error("DuplicateCaseId", "case id '" + c.id + "' appears twice", where(c));
    if (!well_formed_columns(c)) {
      error("BadColumnLayout", "columns must be data, input, derive..., output", where(c));
      continue;
    }
    std::set<IdentityId> in_case;
    for (const auto& col : c.columns) {
      for (const auto& e : col.elements) {
        if (e.id == 0 || e.identity == 0) error("InvalidId", "element and identity ids start at 1", where(c, e.id));
        if (!element_ids.insert(e.id).second) error("DuplicateElementId", "element id reused", where(c, e.id));
        if (e.id >= d.next_element) error("CounterBehind", "element id not below next_element", where(c, e.id));
        if (e.identity >= d.next_identity) {
          error("CounterBehind", "identity id not below next_identity", where(c, e.id));
        }
        if (!in_case.insert(e.identity).second) {
          error("DuplicateIdentityInCase", "identity " + std::to_string(e.identity) + " appears twice in one case",
                where(c, e.id));
        }
        if (!fits_shape(e.value, e.shape)) {
          error("ShapeValueMismatch", "value does not fit shape " + std::string(to_string(e.shape)), where(c, e.id));
        }
        if (e.shape == Shape::Label) {
          if (col.kind != ColumnKind::Input && col.kind != ColumnKind::Output) {
            error("LabelPlacement", "labels belong in input or output columns", where(c, e.id));
          }
          const bool ok = e.label_for && std::any_of(col.elements.begin(), col.elements.end(), [&](const Element& t) {
                            return t.id == *e.label_for && !is_annotation(t.shape);
                          });
          if (!ok) error("LabelTarget", "label must describe a data element in its column", where(c, e.id));
        } else if (e.label_for) {
          error("LabelTarget", "only labels describe other elements", where(c, e.id));
        }
      }
    }
  }
  if (has_errors(out)) return out;

  // Identity classes must agree on shape and column.
  std::map<IdentityId, IdentityInfo> info;
  std::map<IdentityId, std::vector<std::pair<std::size_t, const Element*>>> members;
  for (std::size_t ci = 0; ci < d.cases.size(); ++ci) {
    const auto& c = d.cases[ci];
    for (std::size_t col = 0; col < c.columns.size(); ++col) {
      for (const auto& e : c.columns[col].elements) {
        IdentityInfo here{c.columns[col].kind, logical_column(c, col), e.shape};
        auto [it, inserted] = info.emplace(e.identity, here);
        if (!inserted) {
          if (it->second.shape != here.shape) {
            error("IdentityShapeMismatch", "identity members differ in shape", where(c, e.id));
          }
          if (it->second.kind != here.kind || it->second.column != here.column) {
            error("IdentityColumnMismatch", "identity members sit in different columns", where(c, e.id));
          }
        }
        members[e.identity].emplace_back(ci, &e);
      }
    }
  }

  bool any_output = false;
  for (const auto& [identity, list] : members) {
    const IdentityInfo& id_info = info.at(identity);
    if (is_annotation(id_info.shape)) continue;
    if (id_info.kind == ColumnKind::Output) any_output = true;
    const Value* seen = nullptr;
    for (const auto& [ci, e] : list) {
      if (e->value.is_empty_marker()) continue;
      if (id_info.kind == ColumnKind::Data && seen && !deep_equal(*seen, e->value)) {
        error("DataValueConflict", "data identity " + std::to_string(identity) + " has different test values",
              where(d.cases[ci], e->id));
      }
      seen = &e->value;
    }
    if (!seen) {
      if (id_info.kind == ColumnKind::Data) {
        error("MissingDataValue", "data identity " + std::to_string(identity) + " has no test value");
      } else if (id_info.kind != ColumnKind::Input) {
        error("NoExamples", "identity " + std::to_string(identity) + " has no value in any case");
      }
    }
  }
  if (!any_output) error("NoOutput", "document has no output element");

  // Dependencies.
  std::map<IdentityId, std::set<IdentityId>> dep_sources;
  for (const auto& c : d.cases) {
    std::map<ElementId, std::pair<std::size_t, const Element*>> local;
    for (std::size_t col = 0; col < c.columns.size(); ++col) {
      for (const auto& e : c.columns[col].elements) local.emplace(e.id, std::pair{col, &e});
    }
    std::set<std::pair<std::set<ElementId>, ElementId>> seen_edges;
    for (const auto& dep : c.dependencies) {
      auto t = local.find(dep.target);
      if (t == local.end()) {
        error("UnknownElement", "dependency target is not in this case", where(c, dep.target));
        continue;
      }
      if (dep.sources.empty()) error("EmptyDependency", "dependency has no sources", where(c, dep.target));
      const auto [tcol, target] = t->second;
      if (is_annotation(target->shape)) {
        error("AnnotationDependency", "dependencies cannot involve comments or labels", where(c, dep.target));
      }
      const ColumnKind tkind = c.columns[tcol].kind;
      if (tkind != ColumnKind::Derive && tkind != ColumnKind::Output) {
        error("BadDependencyTarget", "dependencies target derive or output elements", where(c, dep.target));
      }
      std::set<ElementId> srcs(dep.sources.begin(), dep.sources.end());
      if (srcs.size() != dep.sources.size()) error("DuplicateSource", "source listed twice", where(c, dep.target));
      if (!seen_edges.emplace(srcs, dep.target).second) {
        error("DuplicateDependency", "dependency repeated", where(c, dep.target));
      }
      for (ElementId s : dep.sources) {
        auto si = local.find(s);
        if (si == local.end()) {
          error("UnknownElement", "dependency source is not in this case", where(c, s));
          continue;
        }
        if (is_annotation(si->second.second->shape)) {
          error("AnnotationDependency", "dependencies cannot involve comments or labels", where(c, s));
        }
        if (si->second.first >= tcol) {
          error("RightToLeftDependency", "dependencies run from left to right", where(c, s));
        }
        dep_sources[target->identity].insert(si->second.second->identity);
      }
    }
  }
  if (has_errors(out)) return out;

  // Explicit sources must be present wherever their target has an example.
  for (const auto& [target, sources] : dep_sources) {
    for (const auto& [ci, e] : members.at(target)) {
      if (e->value.is_empty_marker()) continue;
      const auto& c = d.cases[ci];
      for (IdentityId s : sources) {
        if (info.at(s).kind == ColumnKind::Data) continue;
        const bool present = std::any_of(members.at(s).begin(), members.at(s).end(), [&](const auto& m) {
          return m.first == ci && !m.second->value.is_empty_marker();
        });
        if (!present) {
          error("MissingSourceValue", "source identity " + std::to_string(s) + " has no value in this case",
                where(c, e->id));
        }
      }
    }
  }

  for (const auto& [identity, v] : d.runtime) {
    auto it = info.find(identity);
    if (it == info.end() || it->second.kind != ColumnKind::Data || is_annotation(it->second.shape)) {
      error("RuntimeBindingNotData", "runtime binding for identity " + std::to_string(identity) +
                                         " which is not a data element");
    } else if (v.contains_empty()) {
      error("ShapeValueMismatch", "runtime binding contains an empty placeholder");
    }
  }
  return out;
}

Document clone_case(const Document& d, std::string_view case_id, std::optional<std::string> new_id) {
  auto it = std::find_if(d.cases.begin(), d.cases.end(), [&](const CaseDiagram& c) { return c.id == case_id; });
  if (it == d.cases.end()) throw DocumentError(DocumentError::Code::UnknownCase, "no case '" + std::string(case_id) + "'");
  Document out = d;
  CaseDiagram copy = *it;
  std::map<ElementId, ElementId> remap;
  for (auto& col : copy.columns) {
    for (auto& e : col.elements) {
      const ElementId fresh = out.next_element++;
      remap[e.id] = fresh;
      e.id = fresh;
      if (!is_annotation(e.shape)) e.value = empty_for(e.shape);
    }
  }
  for (auto& col : copy.columns) {
    for (auto& e : col.elements) {
      if (e.label_for) e.label_for = remap.at(*e.label_for);
    }
  }
  for (auto& dep : copy.dependencies) {
    for (auto& s : dep.sources) s = remap.count(s) ? remap.at(s) : s;
    dep.target = remap.count(dep.target) ? remap.at(dep.target) : dep.target;
  }
  if (new_id) {
    copy.id = *new_id;
  } else {
    long long next = 1;
    std::set<std::string> taken;
    for (const auto& c : d.cases) {
      taken.insert(c.id);
      try {
        std::size_t used = 0;
        const long long n = std::stoll(c.id, &used);
        if (used == c.id.size()) next = std::max(next, n + 1);
      } catch (const std::exception&) {
      }
    }
    while (taken.count(std::to_string(next))) ++next;
    copy.id = std::to_string(next);
  }
  out.cases.push_back(std::move(copy));
  return out;
}

Document delete_element(const Document& d, ElementId id) {
  if (!locate(d, id)) throw DocumentError(DocumentError::Code::UnknownElement, "no element " + std::to_string(id));
  Document out = d;
  for (auto& c : out.cases) {
    for (auto& col : c.columns) {
      std::erase_if(col.elements, [&](const Element& e) { return e.id == id || (e.label_for && *e.label_for == id); });
    }
    for (auto& dep : c.dependencies) std::erase(dep.sources, id);
    std::erase_if(c.dependencies, [&](const Dependency& dep) { return dep.target == id || dep.sources.empty(); });
  }
  const auto classes = identity_classes(out);
  std::erase_if(out.runtime, [&](const auto& kv) { return !classes.count(kv.first); });
  return out;
}

Document set_element_value(const Document& d, ElementId id, Value v) {
  Document out = d;
  Element* e = find_mut(out, id);
  if (!e) throw DocumentError(DocumentError::Code::UnknownElement, "no element " + std::to_string(id));
  if (!fits_shape(v, e->shape)) {
    throw DocumentError(DocumentError::Code::ShapeMismatch, "value does not fit shape " + std::string(to_string(e->shape)));
  }
  e->value = std::move(v);
  return out;
}

Document merge_identity(const Document& d, IdentityId a, IdentityId b) {
  const auto classes = identity_classes(d);
  if (!classes.count(a) || !classes.count(b)) {
    throw DocumentError(DocumentError::Code::UnknownIdentity, "unknown identity");
  }
  if (a == b) throw DocumentError(DocumentError::Code::SameCaseConflict, "cannot merge an identity with itself");
  for (const auto& c : d.cases) {
    bool has_a = false, has_b = false;
    for (const auto& col : c.columns)
      for (const auto& e : col.elements) {
        has_a = has_a || e.identity == a;
        has_b = has_b || e.identity == b;
      }
    if (has_a && has_b) {
      throw DocumentError(DocumentError::Code::SameCaseConflict, "both identities occur in case " + c.id);
    }
  }
  const auto info = identity_info(d);
  const auto& ia = info.at(a);
  const auto& ib = info.at(b);
  if (ia.shape != ib.shape || ia.kind != ib.kind || ia.column != ib.column) {
    throw DocumentError(DocumentError::Code::ShapeMismatch, "identities differ in shape or column");
  }
  Document out = d;
  for (auto& c : out.cases)
    for (auto& col : c.columns)
      for (auto& e : col.elements)
        if (e.identity == b) e.identity = a;
  auto rb = out.runtime.find(b);
  if (rb != out.runtime.end()) {
    if (!out.runtime.count(a)) out.runtime.emplace(a, rb->second);
    out.runtime.erase(b);
  }
  return out;
}

Document split_identity(const Document& d, IdentityId identity, const std::set<ElementId>& members) {
  const auto classes = identity_classes(d);
  auto it = classes.find(identity);
  if (it == classes.end()) throw DocumentError(DocumentError::Code::UnknownIdentity, "unknown identity");
  const std::set<ElementId> cls(it->second.begin(), it->second.end());
  const bool subset = std::includes(cls.begin(), cls.end(), members.begin(), members.end());
  if (members.empty() || !subset || members.size() == cls.size()) {
    throw DocumentError(DocumentError::Code::NotProperSubset, "members must be a non-empty proper subset of the class");
  }
  Document out = d;
  const IdentityId fresh = out.next_identity++;
  for (auto& c : out.cases)
    for (auto& col : c.columns)
      for (auto& e : col.elements)
        if (members.count(e.id)) e.identity = fresh;
  return out;
}

Document set_runtime_binding(const Document& d, IdentityId identity, Value v) {
  const auto info = identity_info(d);
  auto it = info.find(identity);
  if (it == info.end() || it->second.kind != ColumnKind::Data || is_annotation(it->second.shape)) {
    throw DocumentError(DocumentError::Code::NotDataElement,
                        "identity " + std::to_string(identity) + " is not a data element");
  }
  if (v.contains_empty()) throw DocumentError(DocumentError::Code::EmptyValue, "runtime value is empty");
  Document out = d;
  out.runtime[identity] = std::move(v);
  return out;
}

std::map<IdentityId, std::string> labels(const Document& d) {
  std::map<IdentityId, std::string> out;
  for (const auto& c : d.cases) {
    for (const auto& col : c.columns) {
      for (const auto& e : col.elements) {
        if (e.shape != Shape::Label || !e.label_for) continue;
        for (const auto& t : col.elements) {
          if (t.id == *e.label_for) out.try_emplace(t.identity, e.value.as_text());
        }
      }
    }
  }
  return out;
}

ZoeaProgram export_to_zoea(const Document& d) {
  const auto diags = validate_document(d);
  if (has_errors(diags)) {
    std::string msg = "document is not valid:";
    for (const auto& x : diags) {
      if (x.severity == Severity::Error) msg += "\n  " + format(x);
    }
    throw DocumentError(DocumentError::Code::ValidationFailed, msg);
  }
  ZoeaProgram p;
  p.name = d.name;
  p.uses = d.uses;

  // Data identities once each, in first-seen order.
  Value::Items data;
  std::set<IdentityId> data_seen;
  for (const auto& c : d.cases) {
    for (const auto& e : c.columns.front().elements) {
      if (is_annotation(e.shape) || !data_seen.insert(e.identity).second) continue;
      data.push_back(*data_test_value(d, e.identity));
    }
  }
  if (!data.empty()) p.data = Value::list(std::move(data));

  for (std::size_t ci = 0; ci < d.cases.size(); ++ci) {
    const auto& c = d.cases[ci];
    ZoeaCase zc;
    auto n = Number::parse(c.id);
    zc.id = n ? Value::number(*n) : Value::text(c.id);
    auto values = [&](const Column& col) {
      Value::Items items;
      for (const auto& e : col.elements) {
        if (is_annotation(e.shape)) continue;
        if (e.value.is_empty_marker()) {
          throw DocumentError(DocumentError::Code::EmptyValue,
                              "element " + std::to_string(e.id) + " in case " + c.id + " has no value");
        }
        items.push_back(e.value);
      }
      return items;
    };
    zc.input = Value::list(values(c.columns[1]));
    for (std::size_t col = 2; col + 1 < c.columns.size(); ++col) {
      for (auto& v : values(c.columns[col])) zc.derives.push_back(std::move(v));
    }
    zc.output = Value::list(values(c.columns.back()));
    // Comments in the first case's data column belong to the header.
    for (const auto& col : c.columns) {
      const std::size_t anchor = ci == 0 && col.kind == ColumnKind::Data ? 0 : ci + 1;
      for (const auto& e : col.elements) {
        if (e.shape != Shape::Comment) continue;
        std::string text = e.value.as_text();
        std::replace(text.begin(), text.end(), '\n', ' ');
        std::replace(text.begin(), text.end(), '\r', ' ');
        p.comments.push_back(ZoeaComment{anchor, " " + text});
      }
    }
    p.cases.push_back(std::move(zc));
  }
  return p;
}

Document import_zoea(const ZoeaProgram& p, ImportMode mode) {
  Document d;
  d.name = p.name;
  d.uses = p.uses;
  // Identity per position and shape: (column kind, derive index, row, shape).
  // Members of one identity must agree in shape, so a position whose shape
  // changes between cases yields several identities.
  std::map<std::tuple<int, std::size_t, std::size_t, int>, IdentityId> by_position;
  auto identity_at = [&](ColumnKind kind, std::size_t column, std::size_t row, Shape shape) {
    auto key = std::tuple{static_cast<int>(kind), column, row, static_cast<int>(shape)};
    auto it = by_position.find(key);
    if (it != by_position.end()) return it->second;
    const IdentityId id = d.next_identity++;
    by_position.emplace(key, id);
    return id;
  };
  auto make = [&](ColumnKind kind, std::size_t column, std::size_t row, const Value& v) {
    const Shape shape = shape_of(v);
    return Element{d.next_element++, identity_at(kind, column, row, shape), shape, v, std::nullopt};
  };
  auto split = [&](const Value& v) {
    if (mode == ImportMode::ListWrapped && v.kind() == ValueKind::List) return v.items();
    return Value::Items{v};
  };

  std::vector<Value> data_values;
  if (p.data) {
    if (mode == ImportMode::ListWrapped && p.data->kind() == ValueKind::List) {
      data_values = p.data->items();
    } else {
      data_values = {*p.data};
    }
  }

  for (std::size_t ci = 0; ci < p.cases.size(); ++ci) {
    const ZoeaCase& zc = p.cases[ci];
    CaseDiagram c;
    c.id = case_id_text(zc.id);
    Column data_col{ColumnKind::Data, 0, {}};
    for (std::size_t r = 0; r < data_values.size(); ++r) {
      data_col.elements.push_back(make(ColumnKind::Data, 0, r, data_values[r]));
    }
    c.columns.push_back(std::move(data_col));

    Column in{ColumnKind::Input, 0, {}};
    const auto ins = split(zc.input);
    for (std::size_t r = 0; r < ins.size(); ++r) in.elements.push_back(make(ColumnKind::Input, 0, r, ins[r]));
    c.columns.push_back(std::move(in));

    for (std::size_t k = 0; k < zc.derives.size(); ++k) {
      Column der{ColumnKind::Derive, 0, {}};
      der.elements.push_back(make(ColumnKind::Derive, k, 0, zc.derives[k]));
      c.columns.push_back(std::move(der));
    }

    Column out{ColumnKind::Output, 0, {}};
    const auto outs = split(zc.output);
    for (std::size_t r = 0; r < outs.size(); ++r) out.elements.push_back(make(ColumnKind::Output, 0, r, outs[r]));
    c.columns.push_back(std::move(out));

    if (mode == ImportMode::Steps) {
      std::vector<ElementId> data_ids;
      for (const auto& e : c.columns.front().elements) data_ids.push_back(e.id);
      for (std::size_t col = 2; col < c.columns.size(); ++col) {
        Dependency dep;
        dep.sources.push_back(c.columns[col - 1].elements.front().id);
        dep.sources.insert(dep.sources.end(), data_ids.begin(), data_ids.end());
        dep.target = c.columns[col].elements.front().id;
        c.dependencies.push_back(std::move(dep));
      }
    }
    d.cases.push_back(std::move(c));
  }

  // Comments become comment elements: header ones in the first data column,
  // the rest in the input column of the case they follow.
  for (const auto& cm : p.comments) {
    const std::size_t ci = cm.anchor == 0 ? 0 : std::min(cm.anchor, d.cases.size()) - 1;
    Column& col = d.cases[ci].columns[cm.anchor == 0 ? 0 : 1];
    std::string text = cm.text;
    if (!text.empty() && text.front() == ' ') text.erase(0, 1);
    col.elements.push_back(Element{d.next_element++, d.next_identity++, Shape::Comment, Value::text(text), std::nullopt});
  }
  return d;
}

// ---- JSON ------------------------------------------------------------------

std::string document_to_json(const Document& d, int indent) {
  Json j = Json::object();
  j["format_version"] = std::string(kDocumentFormatVersion);
  j["name"] = d.name;
  j["uses"] = d.uses;
  Json cases = Json::array();
  for (const auto& c : d.cases) {
    Json jc = Json::object();
    jc["id"] = c.id;
    Json cols = Json::array();
    for (const auto& col : c.columns) {
      Json jcol = Json::object();
      jcol["kind"] = std::string(to_string(col.kind));
      jcol["offset"] = col.offset;
      Json els = Json::array();
      for (const auto& e : col.elements) {
        Json je = Json::object();
        je["id"] = e.id;
        je["identity"] = e.identity;
        je["shape"] = std::string(to_string(e.shape));
        if (e.value.is_empty_marker()) {
          je["empty"] = true;
        } else {
          je["value"] = to_njson(e.value);
        }
        if (e.label_for) je["label_for"] = *e.label_for;
        els.push_back(std::move(je));
      }
      jcol["elements"] = std::move(els);
      cols.push_back(std::move(jcol));
    }
    jc["columns"] = std::move(cols);
    Json deps = Json::array();
    for (const auto& dep : c.dependencies) {
      deps.push_back(Json{{"sources", dep.sources}, {"target", dep.target}});
    }
    jc["dependencies"] = std::move(deps);
    cases.push_back(std::move(jc));
  }
  j["cases"] = std::move(cases);
  Json classes = Json::object();
  for (const auto& [identity, ids] : identity_classes(d)) classes[std::to_string(identity)] = ids;
  j["identities"] = Json{{"next_element", d.next_element}, {"next_identity", d.next_identity}, {"classes", classes}};
  Json runtime = Json::object();
  for (const auto& [identity, v] : d.runtime) runtime[std::to_string(identity)] = to_njson(v);
  j["runtime"] = std::move(runtime);
  return j.dump(indent);
}

namespace {

[[noreturn]] void bad_format(const std::string& what) { throw DocumentError(DocumentError::Code::FormatError, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) bad_format(std::string("expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) bad_format(std::string("missing field '") + key + "'");
  return *it;
}

std::uint64_t id_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    bad_format(std::string("field '") + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::uint64_t parse_id_key(const std::string& s) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  bad_format("identity key '" + s + "' is not a number");
}

}  // namespace

Document document_from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    bad_format(std::string("malformed JSON: ") + e.what());
  }
  const Json& ver = field(j, "format_version");
  if (!ver.is_string()) bad_format("format_version must be a string");
  const std::string version = ver.get<std::string>();
  if (version.substr(0, version.find('.')) != "1") {
    throw DocumentError(DocumentError::Code::UnsupportedVersion, "unsupported document format " + version);
  }
  try {
    Document d;
    d.name = field(j, "name").get<std::string>();
    for (const auto& u : field(j, "uses")) d.uses.push_back(u.get<std::string>());
    for (const auto& jc : field(j, "cases")) {
      CaseDiagram c;
      const Json& id = field(jc, "id");
      c.id = id.is_string() ? id.get<std::string>() : id.dump();
      for (const auto& jcol : field(jc, "columns")) {
        Column col;
        auto kind = column_kind_from_string(field(jcol, "kind").get<std::string>());
        if (!kind) bad_format("unknown column kind");
        col.kind = *kind;
        if (jcol.contains("offset")) col.offset = jcol["offset"].get<int>();
        for (const auto& je : field(jcol, "elements")) {
          Element e;
          e.id = id_field(je, "id");
          e.identity = id_field(je, "identity");
          auto shape = shape_from_string(field(je, "shape").get<std::string>());
          if (!shape) bad_format("unknown element shape");
          e.shape = *shape;
          if (je.value("empty", false)) {
            if (is_annotation(e.shape)) bad_format("comments and labels cannot be empty placeholders");
            e.value = empty_for(e.shape);
          } else {
            const auto hint = e.shape == Shape::Table ? std::optional{ValueKind::Table} : std::nullopt;
            e.value = from_njson(field(je, "value"), hint);
          }
          if (je.contains("label_for")) e.label_for = id_field(je, "label_for");
          col.elements.push_back(std::move(e));
        }
        c.columns.push_back(std::move(col));
      }
      for (const auto& jd : field(jc, "dependencies")) {
        Dependency dep;
        for (const auto& s : field(jd, "sources")) dep.sources.push_back(s.get<ElementId>());
        dep.target = id_field(jd, "target");
        c.dependencies.push_back(std::move(dep));
      }
      d.cases.push_back(std::move(c));
    }
    const Json& ids = field(j, "identities");
    d.next_element = id_field(ids, "next_element");
    d.next_identity = id_field(ids, "next_identity");
    if (ids.contains("classes")) {
      std::map<IdentityId, std::vector<ElementId>> declared;
      for (auto it = ids["classes"].begin(); it != ids["classes"].end(); ++it) {
        declared[parse_id_key(it.key())] = it.value().get<std::vector<ElementId>>();
      }
      if (declared != identity_classes(d)) bad_format("identity classes disagree with element identities");
    }
    if (j.contains("runtime")) {
      for (auto it = j["runtime"].begin(); it != j["runtime"].end(); ++it) {
        d.runtime[parse_id_key(it.key())] = from_njson(it.value());
      }
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    bad_format(std::string("bad document field: ") + e.what());
  } catch (const ValueError& e) {
    bad_format(std::string("bad value: ") + e.what());
  }
}

}  // namespace zoea
