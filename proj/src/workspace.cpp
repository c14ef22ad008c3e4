#include "zoea/workspace.hpp"

#include <algorithm>
#include <chrono>
#include <functional>

namespace zoea {

std::string_view to_string(WorkspaceError::Code code) {
  using C = WorkspaceError::Code;
  switch (code) {
    case C::NotFound: return "NotFound";
    case C::AlreadyExists: return "AlreadyExists";
    case C::InvalidId: return "InvalidId";
    case C::RevisionConflict: return "RevisionConflict";
    case C::InUse: return "InUse";
    case C::AlreadyCompiling: return "AlreadyCompiling";
    case C::ValidationFailed: return "ValidationFailed";
    case C::NotCompiled: return "NotCompiled";
    case C::StalePipeline: return "StalePipeline";
    case C::CycleDetected: return "CycleDetected";
    case C::RunFailed: return "RunFailed";
    case C::BadRequest: return "BadRequest";
  }
  return "?";
}

namespace {

long long now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

bool compiled_now(const StoredProgram& p) { return p.pipeline && p.pipeline_revision == p.revision; }

std::vector<std::string> error_lines(const std::vector<Diagnostic>& diags) {
  std::vector<std::string> out;
  for (const auto& d : diags) {
    if (d.severity == Severity::Error) out.push_back(format(d));
  }
  return out;
}

}  // namespace

CompileLease::~CompileLease() { ws_.release(id_); }

Workspace::Workspace(std::filesystem::path store_dir, SearchConfig defaults)
    : store_(std::move(store_dir)), defaults_(std::move(defaults)) {
  check_config(defaults_);
}

StoredProgram Workspace::must_get(const std::string& id) {
  std::optional<StoredProgram> p;
  try {
    p = store_.load(id);
  } catch (const StoreError& e) {
    throw WorkspaceError(WorkspaceError::Code::NotFound, "program '" + id + "' cannot be read: " + e.what());
  }
  if (!p) throw WorkspaceError(WorkspaceError::Code::NotFound, "no program '" + id + "'");
  return std::move(*p);
}

std::vector<ProgramSummary> Workspace::list() {
  std::vector<ProgramSummary> out;
  for (const auto& id : store_.ids()) {
    try {
      auto p = get(id);
      out.push_back(ProgramSummary{p.id, p.revision, compiled_now(p)});
    } catch (const WorkspaceError&) {
      // removed concurrently
    }
  }
  return out;
}

StoredProgram Workspace::create(const Document& d) {
  if (!Store::valid_id(d.name)) {
    throw WorkspaceError(WorkspaceError::Code::InvalidId, "'" + d.name + "' cannot be used as a program id");
  }
  std::lock_guard lock(mu_);
  if (store_.load(d.name)) throw WorkspaceError(WorkspaceError::Code::AlreadyExists, "program '" + d.name + "' exists");
  check_acyclic(d.name, d.uses);
  StoredProgram p;
  p.id = d.name;
  p.revision = 1;
  p.document = d;
  p.created = p.updated = now_ms();
  store_.save(p);
  return p;
}

StoredProgram Workspace::get(const std::string& id) {
  StoredProgram p = must_get(id);
  if (compiled_now(p) && !replays_document(*p.pipeline, p.document)) p.pipeline.reset();
  return p;
}

StoredProgram Workspace::put(const std::string& id, const Document& d, std::uint64_t revision) {
  if (d.name != id) throw WorkspaceError(WorkspaceError::Code::BadRequest, "document name must equal the program id");
  std::lock_guard lock(mu_);
  StoredProgram p = must_get(id);
  if (p.revision != revision) {
    throw WorkspaceError(WorkspaceError::Code::RevisionConflict,
                         "program '" + id + "' is at revision " + std::to_string(p.revision) + ", not " +
                             std::to_string(revision));
  }
  check_acyclic(id, d.uses);
  p.document = d;
  p.revision += 1;
  p.updated = now_ms();
  store_.save(p);
  return p;
}

void Workspace::remove(const std::string& id) {
  std::lock_guard lock(mu_);
  must_get(id);
  std::vector<std::string> users;
  for (const auto& other : store_.ids()) {
    if (other == id) continue;
    auto p = store_.load(other);
    if (p && std::find(p->document.uses.begin(), p->document.uses.end(), id) != p->document.uses.end()) {
      users.push_back(other);
    }
  }
  if (!users.empty()) {
    std::string msg = "program '" + id + "' is used by";
    for (const auto& u : users) msg += " " + u;
    throw WorkspaceError(WorkspaceError::Code::InUse, msg, users);
  }
  store_.remove(id);
}

void Workspace::check_acyclic(const std::string& id, const std::vector<std::string>& uses) {
  std::vector<std::string> path{id};
  std::set<std::string> done;
  std::function<bool(const std::string&)> reaches = [&](const std::string& node) -> bool {
    path.push_back(node);
    if (node == id) return true;
    if (done.insert(node).second) {
      std::optional<StoredProgram> p;
      try {
        p = store_.load(node);
      } catch (const StoreError&) {
      }
      if (p) {
        for (const auto& next : p->document.uses) {
          if (reaches(next)) return true;
        }
      }
    }
    path.pop_back();
    return false;
  };
  for (const auto& u : uses) {
    if (reaches(u)) {
      std::string msg = "uses would form a cycle:";
      for (const auto& step : path) msg += " " + step;
      throw WorkspaceError(WorkspaceError::Code::CycleDetected, msg, path);
    }
  }
}

std::unique_ptr<CompileLease> Workspace::acquire_compile(const std::string& id) {
  must_get(id);
  std::lock_guard lock(compiling_mu_);
  if (!compiling_.insert(id).second) {
    throw WorkspaceError(WorkspaceError::Code::AlreadyCompiling, "program '" + id + "' is already compiling");
  }
  return std::unique_ptr<CompileLease>(new CompileLease(*this, id));
}

void Workspace::release(const std::string& id) {
  std::lock_guard lock(compiling_mu_);
  compiling_.erase(id);
}

PipelineLibrary Workspace::library_for(const Document& d) {
  PipelineLibrary lib;
  for (const auto& name : d.uses) {
    auto p = get(name);
    if (!compiled_now(p)) {
      throw WorkspaceError(WorkspaceError::Code::NotCompiled, "used program '" + name + "' is not compiled", {name});
    }
    lib.emplace(name, std::make_shared<const Pipeline>(std::move(*p.pipeline)));
  }
  return lib;
}

void Workspace::check_compilable(const std::string& id) {
  StoredProgram p = must_get(id);
  auto diags = validate_document(p.document);
  if (has_errors(diags)) {
    throw WorkspaceError(WorkspaceError::Code::ValidationFailed, "program '" + id + "' is not valid",
                         error_lines(diags));
  }
  library_for(p.document);
}

CompileReport Workspace::compile(const CompileLease& lease, const EventSink& sink) {
  StoredProgram snapshot = must_get(lease.id());
  PipelineLibrary lib = library_for(snapshot.document);
  CompileReport report;
  try {
    report = compile_document(snapshot.document, defaults_, sink, lib);
  } catch (const CompileError& e) {
    const auto code = e.code() == CompileError::Code::UnresolvedUse ? WorkspaceError::Code::NotCompiled
                                                                     : WorkspaceError::Code::ValidationFailed;
    throw WorkspaceError(code, e.what(), error_lines(e.diagnostics()));
  }
  if (report.success) {
    std::lock_guard lock(mu_);
    StoredProgram current = must_get(lease.id());
    current.pipeline = *report.pipeline;
    current.pipeline_revision = snapshot.revision;
    store_.save(current);
  }
  return report;
}

CompileReport Workspace::compile(const std::string& id, const EventSink& sink) {
  auto lease = acquire_compile(id);
  return compile(*lease, sink);
}

RunOutput Workspace::run(const std::string& id, const std::vector<Value>& inputs) {
  StoredProgram p = get(id);
  if (!p.pipeline) throw WorkspaceError(WorkspaceError::Code::NotCompiled, "program '" + id + "' is not compiled");
  if (p.pipeline_revision != p.revision) {
    throw WorkspaceError(WorkspaceError::Code::StalePipeline,
                         "program '" + id + "' changed since it was compiled; compile it again");
  }
  RunOutput out;
  try {
    out.outputs = run_pipeline(*p.pipeline, inputs, p.document);
  } catch (const RunError& e) {
    const auto code =
        e.code() == RunError::Code::ArityMismatch ? WorkspaceError::Code::BadRequest : WorkspaceError::Code::RunFailed;
    throw WorkspaceError(code, e.what());
  }
  auto label = [&](IdentityId id) {
    auto it = p.pipeline->labels.find(id);
    return it == p.pipeline->labels.end() ? std::string() : it->second;
  };
  for (IdentityId i : p.pipeline->inputs) out.input_labels.push_back(label(i));
  for (IdentityId o : p.pipeline->outputs) out.output_labels.push_back(label(o));
  return out;
}

std::vector<UseEntry> Workspace::uses(const std::string& id) {
  StoredProgram self = must_get(id);
  std::vector<UseEntry> out;
  for (const auto& other : store_.ids()) {
    if (other == id) continue;
    std::optional<StoredProgram> p;
    try {
      p = store_.load(other);
    } catch (const StoreError&) {
      continue;
    }
    if (!p) continue;
    const bool selected =
        std::find(self.document.uses.begin(), self.document.uses.end(), other) != self.document.uses.end();
    out.push_back(UseEntry{other, compiled_now(*p), selected});
  }
  return out;
}

StoredProgram Workspace::set_uses(const std::string& id, const std::vector<std::string>& names) {
  std::lock_guard lock(mu_);
  StoredProgram p = must_get(id);
  std::set<std::string> seen;
  for (const auto& name : names) {
    if (!seen.insert(name).second) throw WorkspaceError(WorkspaceError::Code::BadRequest, "'" + name + "' listed twice");
    if (name == id) {
      throw WorkspaceError(WorkspaceError::Code::CycleDetected, "a program cannot use itself", {id, id});
    }
    auto used = must_get(name);
    if (!compiled_now(used)) {
      throw WorkspaceError(WorkspaceError::Code::NotCompiled, "program '" + name + "' is not compiled", {name});
    }
  }
  check_acyclic(id, names);
  p.document.uses = names;
  p.revision += 1;
  p.updated = now_ms();
  store_.save(p);
  return p;
}

std::string Workspace::export_text(const std::string& id) {
  StoredProgram p = must_get(id);
  try {
    return print_zoea(export_to_zoea(p.document));
  } catch (const DocumentError& e) {
    throw WorkspaceError(WorkspaceError::Code::ValidationFailed, e.what());
  }
}

}  // namespace zoea
