#pragma once

#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "zoea/compiler.hpp"
#include "zoea/store.hpp"

namespace zoea {

class WorkspaceError : public std::runtime_error {
 public:
  enum class Code {
    NotFound,
    AlreadyExists,
    InvalidId,
    RevisionConflict,
    InUse,
    AlreadyCompiling,
    ValidationFailed,
    NotCompiled,
    StalePipeline,
    CycleDetected,
    RunFailed,
    BadRequest,
  };

  WorkspaceError(Code code, const std::string& message, std::vector<std::string> details = {})
      : std::runtime_error(message), code_(code), details_(std::move(details)) {}

  Code code() const noexcept { return code_; }
  /// Extra facts: users for InUse, the cycle for CycleDetected, diagnostics...
  const std::vector<std::string>& details() const noexcept { return details_; }

 private:
  Code code_;
  std::vector<std::string> details_;
};

std::string_view to_string(WorkspaceError::Code code);

struct ProgramSummary {
  std::string id;
  std::uint64_t revision = 0;
  bool compiled = false;  // has a pipeline for the current revision
};

struct UseEntry {
  std::string program;
  bool compiled = false;
  bool selected = false;
};

struct RunOutput {
  std::vector<Value> outputs;
  std::vector<std::string> input_labels;   // "" where unlabelled
  std::vector<std::string> output_labels;
};

class Workspace;

/// Exclusive right to compile one program; released on destruction.
class CompileLease {
 public:
  CompileLease(const CompileLease&) = delete;
  CompileLease& operator=(const CompileLease&) = delete;
  ~CompileLease();

  const std::string& id() const noexcept { return id_; }

 private:
  friend class Workspace;
  CompileLease(Workspace& ws, std::string id) : ws_(ws), id_(std::move(id)) {}

  Workspace& ws_;
  std::string id_;
};

/// Program management over a Store. Thread-safe.
class Workspace {
 public:
  explicit Workspace(std::filesystem::path store_dir, SearchConfig defaults = {});

  Store& store() noexcept { return store_; }
  const SearchConfig& search_defaults() const noexcept { return defaults_; }

  std::vector<ProgramSummary> list();
  /// The program id is the document name.
  StoredProgram create(const Document& d);
  /// Drops a stored pipeline that no longer replays the document.
  StoredProgram get(const std::string& id);
  StoredProgram put(const std::string& id, const Document& d, std::uint64_t revision);
  void remove(const std::string& id);

  /// The checks compile() makes before emitting anything: validation and
  /// compiled uses.
  void check_compilable(const std::string& id);

  /// Throws AlreadyCompiling while another lease on `id` is alive.
  std::unique_ptr<CompileLease> acquire_compile(const std::string& id);
  /// Validates, compiles and, on success, stores the pipeline for the compiled
  /// revision. Failures leave any earlier pipeline in place.
  CompileReport compile(const CompileLease& lease, const EventSink& sink = {});
  CompileReport compile(const std::string& id, const EventSink& sink = {});

  RunOutput run(const std::string& id, const std::vector<Value>& inputs);

  std::vector<UseEntry> uses(const std::string& id);
  StoredProgram set_uses(const std::string& id, const std::vector<std::string>& names);

  std::string export_text(const std::string& id);

 private:
  friend class CompileLease;

  StoredProgram must_get(const std::string& id);
  /// Throws CycleDetected when giving `id` these uses would close a loop.
  void check_acyclic(const std::string& id, const std::vector<std::string>& uses);
  PipelineLibrary library_for(const Document& d);
  void release(const std::string& id);

  Store store_;
  SearchConfig defaults_;
  std::mutex mu_;  // serialises read-modify-write on the store
  std::mutex compiling_mu_;
  std::set<std::string> compiling_;
};

}  // namespace zoea
