#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "zoea/diagnostic.hpp"
#include "zoea/value.hpp"
#include "zoea/zoea_text.hpp"

namespace zoea {

using ElementId = std::uint64_t;
using IdentityId = std::uint64_t;

enum class ColumnKind { Data, Input, Derive, Output };
enum class Shape { Scalar, List, Table, Object, Comment, Label };

std::string_view to_string(ColumnKind kind);
std::string_view to_string(Shape shape);
std::optional<ColumnKind> column_kind_from_string(std::string_view s);
std::optional<Shape> shape_from_string(std::string_view s);

/// Shape a value would be drawn with (comments and labels are never inferred).
Shape shape_of(const Value& v);
/// The empty placeholder matching a data shape.
Value empty_for(Shape shape);
bool is_annotation(Shape shape);  // comment or label

struct Element {
  ElementId id = 0;
  IdentityId identity = 0;
  Shape shape = Shape::Scalar;
  Value value;  // may be an empty marker
  /// Labels only: the input/output element in the same column they describe.
  std::optional<ElementId> label_for;
};

struct Column {
  ColumnKind kind = ColumnKind::Input;
  int offset = 0;  // vertical layout shift, no meaning to compilation
  std::vector<Element> elements;
};

struct Dependency {
  std::vector<ElementId> sources;
  ElementId target = 0;
};

struct CaseDiagram {
  std::string id;
  std::vector<Column> columns;
  std::vector<Dependency> dependencies;
};

struct Document {
  std::string name;
  std::vector<std::string> uses;
  std::vector<CaseDiagram> cases;
  std::map<IdentityId, Value> runtime;
  ElementId next_element = 1;
  IdentityId next_identity = 1;
};

class DocumentError : public std::runtime_error {
 public:
  enum class Code {
    UnknownCase,
    UnknownElement,
    UnknownIdentity,
    SameCaseConflict,
    ShapeMismatch,
    NotProperSubset,
    ValidationFailed,
    EmptyValue,
    NotDataElement,
    FormatError,
    UnsupportedVersion,
  };

  DocumentError(Code code, const std::string& message) : std::runtime_error(message), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

std::string_view to_string(DocumentError::Code code);

/// Where an element lives.
struct ElementRef {
  std::size_t case_index;
  std::size_t column;
  std::size_t row;
};

std::optional<ElementRef> locate(const Document& d, ElementId id);
const Element& element_at(const Document& d, const ElementRef& ref);

/// Identity classes: identity -> member element ids in document order.
std::map<IdentityId, std::vector<ElementId>> identity_classes(const Document& d);

/// Column position and kind of an identity (taken from its first member).
struct IdentityInfo {
  ColumnKind kind;
  std::size_t column;
  Shape shape;
};
std::map<IdentityId, IdentityInfo> identity_info(const Document& d);

/// Every structural rule; empty iff the document is ready to compile.
std::vector<Diagnostic> validate_document(const Document& d);

/// Appends a copy of `case_id` with fresh element ids, the same identities,
/// empty values and copied dependencies. The new case id is `new_id` or the
/// next free number.
Document clone_case(const Document& d, std::string_view case_id, std::optional<std::string> new_id = std::nullopt);

/// Removes an element and every dependency edge touching it (a dependency left
/// without sources is dropped).
Document delete_element(const Document& d, ElementId id);

/// Sets the test value of one element. The value must fit the element shape.
Document set_element_value(const Document& d, ElementId id, Value v);

Document merge_identity(const Document& d, IdentityId a, IdentityId b);
Document split_identity(const Document& d, IdentityId identity, const std::set<ElementId>& members);

/// Binds the runtime version of a data identity; the test value is untouched.
Document set_runtime_binding(const Document& d, IdentityId identity, Value v);

/// The value of a data identity as seen by tests: its non-empty test value.
std::optional<Value> data_test_value(const Document& d, IdentityId identity);
/// Runtime binding when present, else the test value.
std::optional<Value> data_runtime_value(const Document& d, IdentityId identity);

/// Text form with inputs and outputs as lists of their column elements.
ZoeaProgram export_to_zoea(const Document& d);

enum class ImportMode {
  /// Inverse of export_to_zoea: input/output/data lists are split into one
  /// element each, every derive value gets its own column. No dependencies.
  ListWrapped,
  /// Textual step semantics: each tag value is one element and each step
  /// depends on the previous step plus the data element.
  Steps,
};

/// Builds a document from a text program. Elements at the same position and
/// of the same shape in different cases share an identity.
Document import_zoea(const ZoeaProgram& p, ImportMode mode);

inline constexpr std::string_view kDocumentFormatVersion = "1.0";

std::string document_to_json(const Document& d, int indent = -1);
/// Throws DocumentError(FormatError | UnsupportedVersion).
Document document_from_json(std::string_view text);

/// Label text per described element identity.
std::map<IdentityId, std::string> labels(const Document& d);

}  // namespace zoea
