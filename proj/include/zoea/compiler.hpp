#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "zoea/document.hpp"
#include "zoea/expr.hpp"
#include "zoea/synthesis.hpp"
#include "zoea/zoea_text.hpp"

namespace zoea {

/// One sub-problem per derive/output identity: its values across user cases
/// as outputs, its sources' values as inputs.
struct SyntheticCase {
  IdentityId target = 0;
  std::vector<IdentityId> sources;        // plan order
  std::vector<std::size_t> case_indices;  // user case behind each row
  std::vector<SynthesisCase> rows;
};

struct CompilationPlan {
  std::vector<IdentityId> order;  // derive/output identities, left to right
  std::map<IdentityId, std::vector<IdentityId>> sources;
  std::vector<IdentityId> inputs;
  std::vector<IdentityId> data;
  std::vector<IdentityId> outputs;
};

/// A target's sources are its drawn dependency sources plus every data
/// identity. `use_dependencies = false` ignores drawn dependencies and gives every
/// target the fallback sources (all usable identities in earlier columns).
CompilationPlan make_plan(const Document& d, bool use_dependencies = true);
std::vector<SyntheticCase> build_synthetic_cases(const Document& d, bool use_dependencies = true);

class CompileError : public std::runtime_error {
 public:
  enum class Code { ValidationFailed, UnresolvedUse, UnequalDerives, BadPipeline };

  CompileError(Code code, const std::string& message, std::vector<Diagnostic> diagnostics = {})
      : std::runtime_error(message), code_(code), diagnostics_(std::move(diagnostics)) {}

  Code code() const noexcept { return code_; }
  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  Code code_;
  std::vector<Diagnostic> diagnostics_;
};

std::string_view to_string(CompileError::Code code);

// ---- events ----------------------------------------------------------------

enum class ElementState { Pending, Active, Solved, Failed };

std::string_view to_string(ElementState s);
std::optional<ElementState> element_state_from_string(std::string_view s);

/// A per-identity status change, or the terminal record closing the stream.
struct CompileEvent {
  bool terminal = false;
  IdentityId identity = 0;
  ElementState state = ElementState::Pending;
  long long ts = 0;  // milliseconds since the epoch
  std::optional<SearchStatistics> stats;
  std::optional<SearchOutcome> outcome;
  bool success = false;             // terminal only
  std::vector<IdentityId> failed;   // terminal only
};

using EventSink = std::function<void(const CompileEvent&)>;

/// One JSON line: `{identity, state, ts, stats?}` or `{result, failed}`.
std::string event_to_json(const CompileEvent& e);
CompileEvent event_from_json(std::string_view line);

/// pending->active, active->solved, active->failed, failed->active. The first
/// state of an identity must be pending.
bool legal_transition(std::optional<ElementState> from, ElementState to);

/// Checks a whole stream: legal transitions, every identity settled, one
/// terminal record at the end whose failed list matches. Returns the first
/// violation, or nullopt.
std::optional<std::string> check_event_stream(const std::vector<CompileEvent>& events);

// ---- pipelines -------------------------------------------------------------

struct Fragment {
  IdentityId identity = 0;
  std::vector<IdentityId> sources;
  Expr expr;
};

struct Pipeline;
using PipelineLibrary = std::map<std::string, std::shared_ptr<const Pipeline>, std::less<>>;

struct Pipeline {
  std::string program;
  std::string catalog_version;
  std::vector<IdentityId> inputs;
  std::vector<IdentityId> outputs;
  std::map<IdentityId, Value> data;  // test values
  std::map<IdentityId, std::string> labels;
  std::vector<Fragment> fragments;  // evaluation order
  PipelineLibrary imports;
};

std::string pipeline_to_json(const Pipeline& p, int indent = -1);
/// Throws CompileError(BadPipeline).
Pipeline pipeline_from_json(std::string_view text);

/// The imports of a pipeline as callables for the interpreter and search.
ImportTable import_table(const PipelineLibrary& library);

class RunError : public std::runtime_error {
 public:
  enum class Code { ArityMismatch, Eval, MissingData };

  RunError(Code code, IdentityId identity, const std::string& message)
      : std::runtime_error(message), code_(code), identity_(identity) {}

  Code code() const noexcept { return code_; }
  IdentityId identity() const noexcept { return identity_; }

 private:
  Code code_;
  IdentityId identity_;
};

/// Evaluates every fragment. Data identities read `runtime` when bound there,
/// else the pipeline's test values.
std::vector<Value> run_pipeline(const Pipeline& p, std::span<const Value> inputs,
                                const std::map<IdentityId, Value>& runtime = {});
/// As above with the document's runtime bindings.
std::vector<Value> run_pipeline(const Pipeline& p, std::span<const Value> inputs, const Document& d);

/// True iff the pipeline reproduces every output value in the document's cases.
bool replays_document(const Pipeline& p, const Document& d);

// ---- compilation -----------------------------------------------------------

struct CompileReport {
  bool success = false;
  std::optional<Pipeline> pipeline;
  std::vector<IdentityId> failed;
  std::map<IdentityId, SearchStatistics> stats;
  std::uint64_t candidates_expanded = 0;  // total over all targets
  double elapsed_ms = 0.0;
};

/// Throws CompileError(ValidationFailed | UnresolvedUse). Search failures are
/// reported, not thrown.
CompileReport compile_document(const Document& d, const SearchConfig& config, const EventSink& sink = {},
                               const PipelineLibrary& library = {}, bool use_dependencies = true);

/// Text programs compile as the chain input -> derive... -> output, each step
/// reading the previous one and the data value.
CompileReport compile_zoea_text(const ZoeaProgram& p, const SearchConfig& config, const EventSink& sink = {},
                                const PipelineLibrary& library = {});

}  // namespace zoea
