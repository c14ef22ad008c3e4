// zoea: compile, run, export, validate, import, serve, bench.
//
// Exit codes for compile/validate/import: 0 ok, 1 unreadable or parse error,
// 2 validation, 3 compile failure. For run: 1 unreadable pipeline or input,
// 2 arity or usage, 3 run error.

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "zoea/bench.hpp"
#include "zoea/compiler.hpp"
#include "zoea/document.hpp"
#include "zoea/http_service.hpp"
#include "zoea/json_bridge.hpp"
#include "zoea/workspace.hpp"
#include "zoea/zoea_text.hpp"

using namespace zoea;

namespace {

enum Exit { kOk = 0, kParse = 1, kInvalid = 2, kFailed = 3 };

struct ExitWith {
  int code;
};

std::optional<std::string> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string read_or_exit(const std::string& path) {
  auto text = slurp(path);
  if (!text) {
    std::cerr << path << ": cannot read file\n";
    throw ExitWith{kParse};
  }
  return *text;
}

bool is_json_path(const std::string& path) {
  return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
}

void print_diagnostics(const std::string& file, const std::vector<Diagnostic>& ds) {
  for (const auto& d : ds) std::cerr << file << ": " << format(d) << "\n";
}

/// A program source: either a .zoea text or a document JSON.
struct Source {
  std::optional<ZoeaProgram> text;
  std::optional<Document> document;

  const std::vector<std::string>& uses() const { return text ? text->uses : document->uses; }
};

Source load_source(const std::string& path) {
  const std::string body = read_or_exit(path);
  Source s;
  try {
    if (is_json_path(path)) {
      s.document = document_from_json(body);
    } else {
      s.text = parse_zoea(body);
    }
  } catch (const ZoeaParseError& e) {
    std::cerr << path << ":" << e.line() << ": error [" << to_string(e.kind()) << "] " << e.detail() << "\n";
    throw ExitWith{kParse};
  } catch (const DocumentError& e) {
    std::cerr << path << ": error [" << to_string(e.code()) << "] " << e.what() << "\n";
    throw ExitWith{kParse};
  }
  return s;
}

std::vector<Diagnostic> validate_source(const Source& s, const std::set<std::string>* known) {
  return s.text ? validate_zoea(*s.text, known) : validate_document(*s.document);
}

/// Pipelines for `uses`, read from the store's compiled programs.
PipelineLibrary resolve_uses(const std::vector<std::string>& uses, const std::string& store_dir,
                             std::vector<Diagnostic>& problems) {
  PipelineLibrary lib;
  if (uses.empty()) return lib;
  if (store_dir.empty()) {
    for (const auto& u : uses) {
      problems.push_back({Severity::Error, "UnresolvedUse", "no --store given to resolve '" + u + "'", ""});
    }
    return lib;
  }
  Store store(store_dir);
  for (const auto& u : uses) {
    auto p = store.load(u);
    if (!p) {
      problems.push_back({Severity::Error, "UnresolvedUse", "program '" + u + "' is not in the store", ""});
    } else if (!p->pipeline || p->pipeline_revision != p->revision) {
      problems.push_back({Severity::Error, "UnresolvedUse", "program '" + u + "' is not compiled", ""});
    } else {
      lib.emplace(u, std::make_shared<const Pipeline>(*p->pipeline));
    }
  }
  return lib;
}

SearchConfig config_from(int max_cost, std::uint64_t timeout_ms, std::uint64_t max_candidates) {
  SearchConfig c;
  c.max_cost = max_cost;
  c.timeout_ms = timeout_ms;
  c.max_candidates = max_candidates;
  try {
    check_config(c);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    throw ExitWith{kInvalid};
  }
  return c;
}

std::string identity_name(IdentityId id, const std::map<IdentityId, std::string>& names) {
  auto it = names.find(id);
  std::string s = "#" + std::to_string(id);
  if (it != names.end() && !it->second.empty()) s += " (" + it->second + ")";
  return s;
}

void render_event(const CompileEvent& e, bool json, const std::map<IdentityId, std::string>& names) {
  if (json) {
    std::cout << event_to_json(e) << "\n" << std::flush;
    return;
  }
  if (e.terminal) {
    std::cout << (e.success ? "success" : "failure");
    if (!e.failed.empty()) {
      std::cout << ", failed:";
      for (auto id : e.failed) std::cout << " " << identity_name(id, names);
    }
    std::cout << "\n" << std::flush;
    return;
  }
  std::cout << "  " << identity_name(e.identity, names) << " " << to_string(e.state);
  if (e.stats && (e.state == ElementState::Solved || e.state == ElementState::Failed)) {
    std::cout << "  [" << e.stats->candidates_expanded << " candidates, " << static_cast<long long>(e.stats->elapsed_ms)
              << " ms";
    if (e.outcome && e.state == ElementState::Failed) std::cout << ", " << to_string(*e.outcome);
    std::cout << "]";
  }
  std::cout << "\n" << std::flush;
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  return static_cast<bool>(out);
}

// ---- compile ---------------------------------------------------------------

struct CompileOpts {
  std::string file;
  int max_cost = SearchConfig{}.max_cost;
  std::uint64_t timeout_ms = SearchConfig{}.timeout_ms;
  std::uint64_t max_candidates = SearchConfig{}.max_candidates;
  std::string store;
  std::string emit_pipeline;
  bool json = false;
  bool no_deps = false;
};

int cmd_compile(const CompileOpts& o) {
  const SearchConfig config = config_from(o.max_cost, o.timeout_ms, o.max_candidates);
  const Source src = load_source(o.file);

  std::vector<Diagnostic> problems = validate_source(src, nullptr);
  // Unresolved uses are reported below with the store in hand.
  std::erase_if(problems, [](const Diagnostic& d) { return d.severity != Severity::Error; });
  PipelineLibrary lib = resolve_uses(src.uses(), o.store, problems);
  if (!problems.empty()) {
    print_diagnostics(o.file, problems);
    return kInvalid;
  }

  std::map<IdentityId, std::string> names;
  if (src.document) names = labels(*src.document);
  const auto sink = [&](const CompileEvent& e) { render_event(e, o.json, names); };

  CompileReport report;
  try {
    report = src.text ? compile_zoea_text(*src.text, config, sink, lib)
                      : compile_document(*src.document, config, sink, lib, !o.no_deps);
  } catch (const CompileError& e) {
    std::cerr << o.file << ": error [" << to_string(e.code()) << "] " << e.what() << "\n";
    print_diagnostics(o.file, e.diagnostics());
    return kInvalid;
  }

  if (!report.success) {
    for (auto id : report.failed) {
      auto it = report.stats.find(id);
      std::cerr << o.file << ": error [SynthesisFailed] no expression found for " << identity_name(id, names);
      if (it != report.stats.end()) std::cerr << " after " << it->second.candidates_expanded << " candidates";
      std::cerr << "\n";
    }
    return kFailed;
  }

  const Pipeline& p = *report.pipeline;
  if (!o.json) {
    for (const auto& f : p.fragments) {
      std::cout << identity_name(f.identity, p.labels) << " = " << canonical_serialization(f.expr) << "\n";
    }
    std::cout << report.candidates_expanded << " candidates, " << static_cast<long long>(report.elapsed_ms)
              << " ms\n";
  }
  if (!o.emit_pipeline.empty() && !write_file(o.emit_pipeline, pipeline_to_json(p, 2) + "\n")) {
    std::cerr << o.emit_pipeline << ": cannot write pipeline\n";
    return kFailed;
  }
  return kOk;
}

// ---- run -------------------------------------------------------------------

struct RunOpts {
  std::string pipeline;
  std::vector<std::string> inputs;
  std::vector<std::string> data;
};

Value parse_relaxed(const std::string& text) {
  ValueReader r(text, true);
  Value v = r.read();
  r.skip_space();
  if (!r.at_end()) throw ValueError(ValueError::Code::ParseError, "trailing characters", r.position());
  return v;
}

int cmd_run(const RunOpts& o) {
  Pipeline p;
  try {
    p = pipeline_from_json(read_or_exit(o.pipeline));
  } catch (const CompileError& e) {
    std::cerr << o.pipeline << ": " << e.what() << "\n";
    return kParse;
  }

  std::vector<Value> inputs;
  for (const auto& s : o.inputs) {
    try {
      inputs.push_back(parse_relaxed(s));
    } catch (const ValueError& e) {
      std::cerr << "--input '" << s << "': " << e.what() << "\n";
      return kParse;
    }
  }

  std::map<IdentityId, Value> runtime;
  for (const auto& binding : o.data) {
    const auto eq = binding.find('=');
    IdentityId id = 0;
    if (eq == std::string::npos || (id = std::strtoull(binding.substr(0, eq).c_str(), nullptr, 10)) == 0) {
      std::cerr << "--data '" << binding << "': expected identity=file.json\n";
      return kInvalid;
    }
    if (!p.data.count(id)) {
      std::cerr << "--data: #" << id << " is not a data element of this pipeline\n";
      return kInvalid;
    }
    const std::string file = binding.substr(eq + 1);
    try {
      runtime[id] = from_json(read_or_exit(file));
    } catch (const ValueError& e) {
      std::cerr << file << ": " << e.what() << "\n";
      return kParse;
    }
  }

  try {
    const std::vector<Value> out = run_pipeline(p, inputs, runtime);
    Json arr = Json::array();
    for (const auto& v : out) arr.push_back(to_njson(v));
    std::cout << arr.dump() << "\n";
  } catch (const RunError& e) {
    std::cerr << "error [" << (e.code() == RunError::Code::ArityMismatch ? "ArityMismatch" : "RunError") << "] "
              << e.what() << "\n";
    if (e.code() == RunError::Code::ArityMismatch) {
      std::cerr << "usage: zoea run " << o.pipeline << " " ;
      for (std::size_t i = 0; i < p.inputs.size(); ++i) std::cerr << "--input VALUE ";
      std::cerr << "\n";
      return kInvalid;
    }
    return kFailed;
  }
  return kOk;
}

// ---- export / import / validate ----------------------------------------------

int cmd_export(const std::string& file, const std::string& store, const std::string& id) {
  try {
    if (!id.empty()) {
      if (store.empty()) {
        std::cerr << "export --id needs --store\n";
        return kInvalid;
      }
      Workspace ws(store);
      std::cout << ws.export_text(id);
      return kOk;
    }
    const std::string body = read_or_exit(file);
    std::cout << print_zoea(export_to_zoea(document_from_json(body)));
  } catch (const DocumentError& e) {
    std::cerr << file << ": error [" << to_string(e.code()) << "] " << e.what() << "\n";
    return kParse;
  } catch (const WorkspaceError& e) {
    std::cerr << "error [" << to_string(e.code()) << "] " << e.what() << "\n";
    return e.code() == WorkspaceError::Code::NotFound ? kParse : kInvalid;
  }
  return kOk;
}

int cmd_import(const std::string& file, const std::string& mode, const std::string& out) {
  const Source src = load_source(file);
  if (!src.text) {
    std::cerr << file << ": import reads .zoea text\n";
    return kParse;
  }
  Document d;
  try {
    d = import_zoea(*src.text, mode == "list" ? ImportMode::ListWrapped : ImportMode::Steps);
  } catch (const DocumentError& e) {
    std::cerr << file << ": error [" << to_string(e.code()) << "] " << e.what() << "\n";
    return kInvalid;
  }
  const std::string json = document_to_json(d, 2) + "\n";
  if (out.empty()) {
    std::cout << json;
  } else if (!write_file(out, json)) {
    std::cerr << out << ": cannot write\n";
    return kFailed;
  }
  return kOk;
}

int cmd_validate(const std::string& file, bool json) {
  const Source src = load_source(file);
  const auto ds = validate_source(src, nullptr);
  if (json) {
    Json arr = Json::array();
    for (const auto& d : ds) {
      arr.push_back(Json{{"severity", std::string(to_string(d.severity))}, {"code", d.code}, {"message", d.message},
                         {"where", d.where}});
    }
    std::cout << arr.dump() << "\n";
  } else {
    print_diagnostics(file, ds);
    if (!has_errors(ds)) std::cout << file << ": ok\n";
  }
  return has_errors(ds) ? kInvalid : kOk;
}

// ---- serve / bench ---------------------------------------------------------

HttpService* g_service = nullptr;

extern "C" void on_signal(int) {
  if (g_service) g_service->stop();
}

int cmd_serve(const std::string& store, const std::string& host, int port, const SearchConfig& config) {
  if (store.empty()) {
    std::cerr << "serve needs --store DIR (or ZOEA_STORE)\n";
    return kInvalid;
  }
  Workspace ws(store, config);
  for (const auto& f : ws.store().unreadable()) std::cerr << "warning: unreadable program file " << f << "\n";
  HttpService svc(ws);
  int bound = port;
  if (port == 0) {
    bound = svc.bind_any_port(host);
  } else if (!svc.bind(host, port)) {
    bound = -1;
  }
  if (bound < 0) {
    std::cerr << "cannot listen on " << host << ":" << port << "\n";
    return kFailed;
  }
  std::cout << "listening on http://" << host << ":" << bound << "\n" << std::flush;
  g_service = &svc;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  svc.listen_after_bind();
  g_service = nullptr;
  return kOk;
}

int cmd_bench(const std::string& suite, const SearchConfig& config, int repeat, const std::string& csv, bool json) {
  BenchReport report;
  try {
    report = run_bench(suite, config, repeat);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << suite << ": " << e.what() << "\n";
    return kParse;
  } catch (const DocumentError& e) {
    std::cerr << suite << ": " << e.what() << "\n";
    return kParse;
  } catch (const CompileError& e) {
    std::cerr << suite << ": " << e.what() << "\n";
    return kInvalid;
  }
  if (json) {
    std::cout << bench_csv(report);
  } else {
    std::cout << bench_table(report);
  }
  if (!csv.empty() && !write_file(csv, bench_csv(report))) {
    std::cerr << csv << ": cannot write\n";
    return kFailed;
  }
  return report.pruning_holds ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zoea inductive programming workbench"};
  app.require_subcommand(1);

  int max_cost = SearchConfig{}.max_cost;
  std::uint64_t timeout_ms = SearchConfig{}.timeout_ms;
  std::uint64_t max_candidates = SearchConfig{}.max_candidates;
  std::string store;
  bool json = false;

  auto budgets = [&](CLI::App* sub) {
    sub->add_option("--max-cost", max_cost, "largest expression cost searched")->capture_default_str();
    sub->add_option("--timeout-ms", timeout_ms, "wall clock per element")->capture_default_str();
    sub->add_option("--max-candidates", max_candidates, "candidate budget per element")->capture_default_str();
  };

  CompileOpts co;
  auto* compile = app.add_subcommand("compile", "synthesize a program from a .zoea file or document JSON");
  compile->add_option("file", co.file)->required();
  budgets(compile);
  compile->add_option("--store", co.store, "workspace store for `use` programs")->envname("ZOEA_STORE");
  compile->add_option("--emit-pipeline", co.emit_pipeline, "write the pipeline JSON here");
  compile->add_flag("--json", co.json, "print raw event records");
  compile->add_flag("--no-deps", co.no_deps, "ignore dependencies (documents only)");

  RunOpts ro;
  auto* run = app.add_subcommand("run", "execute a compiled pipeline");
  run->add_option("pipeline", ro.pipeline)->required();
  run->add_option("--input", ro.inputs, "one input value, relaxed JSON; repeat in order");
  run->add_option("--data", ro.data, "runtime data binding identity=file.json");

  std::string export_file, export_id;
  auto* exp = app.add_subcommand("export", "print a document as .zoea text");
  exp->add_option("file", export_file);
  exp->add_option("--id", export_id, "program id in the store");
  exp->add_option("--store", store)->envname("ZOEA_STORE");

  std::string import_file, import_mode = "steps", import_out;
  auto* imp = app.add_subcommand("import", "convert .zoea text into document JSON");
  imp->add_option("file", import_file)->required();
  imp->add_option("--mode", import_mode, "steps or list")->check(CLI::IsMember({"steps", "list"}))
      ->capture_default_str();
  imp->add_option("-o,--output", import_out);

  std::string validate_file;
  auto* val = app.add_subcommand("validate", "check a .zoea file or document JSON");
  val->add_option("file", validate_file)->required();
  val->add_flag("--json", json);

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "run the workspace HTTP service");
  serve->add_option("--store", store)->envname("ZOEA_STORE");
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port, "0 picks a free port")->capture_default_str();
  budgets(serve);

  std::string suite, csv;
  int repeat = 3;
  auto* bench = app.add_subcommand("bench", "compare search with and without dependencies");
  bench->add_option("suite", suite, "directory of document JSONs")->required();
  bench->add_option("--repeat", repeat)->capture_default_str();
  bench->add_option("--csv", csv, "also write CSV here");
  bench->add_flag("--json", json, "print CSV instead of the table");
  budgets(bench);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*compile) {
      co.max_cost = max_cost;
      co.timeout_ms = timeout_ms;
      co.max_candidates = max_candidates;
      return cmd_compile(co);
    }
    if (*run) return cmd_run(ro);
    if (*exp) {
      if (export_file.empty() == export_id.empty()) {
        std::cerr << "export takes a file or --id\n";
        return kInvalid;
      }
      return cmd_export(export_file, store, export_id);
    }
    if (*imp) return cmd_import(import_file, import_mode, import_out);
    if (*val) return cmd_validate(validate_file, json);
    if (*serve) return cmd_serve(store, host, port, config_from(max_cost, timeout_ms, max_candidates));
    if (*bench) return cmd_bench(suite, config_from(max_cost, timeout_ms, max_candidates), repeat, csv, json);
  } catch (const ExitWith& e) {
    return e.code;
  } catch (const StoreError& e) {
    std::cerr << "store: " << e.what() << "\n";
    return kFailed;
  }
  return kOk;
}
