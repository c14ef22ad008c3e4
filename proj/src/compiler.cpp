#include "zoea/compiler.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <tuple>

#include "zoea/catalog.hpp"
#include "zoea/json_bridge.hpp"

namespace zoea {

std::string_view to_string(CompileError::Code code) {
  switch (code) {
    case CompileError::Code::ValidationFailed: return "ValidationFailed";
    case CompileError::Code::UnresolvedUse: return "UnresolvedUse";
    case CompileError::Code::UnequalDerives: return "UnequalDerives";
    case CompileError::Code::BadPipeline: return "BadPipeline";
  }
  return "?";
}

std::string_view to_string(ElementState s) {
  switch (s) {
    case ElementState::Pending: return "pending";
    case ElementState::Active: return "active";
    case ElementState::Solved: return "solved";
    case ElementState::Failed: return "failed";
  }
  return "?";
}

std::optional<ElementState> element_state_from_string(std::string_view s) {
  for (auto st : {ElementState::Pending, ElementState::Active, ElementState::Solved, ElementState::Failed}) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

namespace {

void require_valid(const Document& d) {
  auto diags = validate_document(d);
  if (!has_errors(diags)) return;
  std::string msg = "document '" + d.name + "' is not valid";
  for (const auto& x : diags) {
    if (x.severity == Severity::Error) {
      msg += "\n  " + format(x);
    }
  }
  throw CompileError(CompileError::Code::ValidationFailed, msg, std::move(diags));
}

/// Non-empty values per identity and case.
using ValueGrid = std::map<IdentityId, std::vector<std::optional<Value>>>;

ValueGrid value_grid(const Document& d) {
  ValueGrid grid;
  for (std::size_t ci = 0; ci < d.cases.size(); ++ci) {
    for (const auto& col : d.cases[ci].columns) {
      for (const auto& e : col.elements) {
        if (is_annotation(e.shape)) continue;
        auto& row = grid[e.identity];
        row.resize(d.cases.size());
        if (!e.value.is_empty_marker()) row[ci] = e.value;
      }
    }
  }
  return grid;
}

/// Identities in column-major order: logical column, then first case, then row.
std::vector<IdentityId> ordered_identities(const Document& d, const std::map<IdentityId, IdentityInfo>& info) {
  std::map<IdentityId, std::tuple<std::size_t, std::size_t, std::size_t>> first;
  for (std::size_t ci = 0; ci < d.cases.size(); ++ci) {
    for (const auto& col : d.cases[ci].columns) {
      std::size_t row = 0;
      for (const auto& e : col.elements) {
        if (is_annotation(e.shape)) continue;
        first.try_emplace(e.identity, std::tuple{info.at(e.identity).column, ci, row});
        ++row;
      }
    }
  }
  std::vector<IdentityId> ids;
  for (const auto& [id, key] : first) ids.push_back(id);
  std::stable_sort(ids.begin(), ids.end(), [&](IdentityId a, IdentityId b) { return first.at(a) < first.at(b); });
  return ids;
}

CompileEvent status(IdentityId id, ElementState state, std::optional<SearchStatistics> stats = std::nullopt,
                    std::optional<SearchOutcome> outcome = std::nullopt) {
  CompileEvent e;
  e.identity = id;
  e.state = state;
  e.stats = std::move(stats);
  e.outcome = outcome;
  return e;
}

long long now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

CompilationPlan make_plan(const Document& d, bool use_dependencies) {
  require_valid(d);
  const auto info = identity_info(d);
  const auto grid = value_grid(d);
  const auto order = ordered_identities(d, info);
  std::map<IdentityId, std::size_t> rank;
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

  std::map<IdentityId, std::set<IdentityId>> drawn;
  if (use_dependencies) {
    for (const auto& c : d.cases) {
      for (const auto& dep : c.dependencies) {
        const IdentityId target = element_at(d, *locate(d, dep.target)).identity;
        for (ElementId s : dep.sources) drawn[target].insert(element_at(d, *locate(d, s)).identity);
      }
    }
  }

  CompilationPlan plan;
  for (IdentityId id : order) {
    const IdentityInfo& in = info.at(id);
    switch (in.kind) {
      case ColumnKind::Data: plan.data.push_back(id); continue;
      case ColumnKind::Input: plan.inputs.push_back(id); continue;
      case ColumnKind::Output: plan.outputs.push_back(id); break;
      case ColumnKind::Derive: break;
    }
    plan.order.push_back(id);
    std::vector<IdentityId> sources;
    auto it = drawn.find(id);
    if (it != drawn.end()) {
      // Data is reference material for every step, drawn or not.
      std::set<IdentityId> with_data = it->second;
      for (IdentityId s : order) {
        if (info.at(s).kind == ColumnKind::Data) with_data.insert(s);
      }
      sources.assign(with_data.begin(), with_data.end());
    } else {
      // Fallback: everything to the left that has a value wherever this target does.
      const auto& target_row = grid.at(id);
      for (IdentityId s : order) {
        const IdentityInfo& si = info.at(s);
        if (si.column >= in.column) continue;
        bool usable = si.kind == ColumnKind::Data;
        if (!usable) {
          usable = true;
          const auto& row = grid.at(s);
          for (std::size_t ci = 0; ci < target_row.size(); ++ci) {
            if (target_row[ci] && !row[ci]) usable = false;
          }
        }
        if (usable) sources.push_back(s);
      }
    }
    std::sort(sources.begin(), sources.end(), [&](IdentityId a, IdentityId b) { return rank.at(a) < rank.at(b); });
    plan.sources[id] = std::move(sources);
  }
  return plan;
}

namespace {

std::vector<SyntheticCase> synthetic_cases_for(const Document& d, const CompilationPlan& plan) {
  const auto grid = value_grid(d);
  std::set<IdentityId> data(plan.data.begin(), plan.data.end());
  std::map<IdentityId, Value> data_values;
  for (IdentityId id : plan.data) data_values.emplace(id, *data_test_value(d, id));

  std::vector<SyntheticCase> out;
  for (IdentityId target : plan.order) {
    SyntheticCase sc;
    sc.target = target;
    sc.sources = plan.sources.at(target);
    const auto& target_row = grid.at(target);
    for (std::size_t ci = 0; ci < d.cases.size(); ++ci) {
      if (!target_row[ci]) continue;
      SynthesisCase row;
      bool complete = true;
      for (IdentityId s : sc.sources) {
        if (data.count(s)) {
          row.inputs.push_back(data_values.at(s));
        } else if (grid.at(s)[ci]) {
          row.inputs.push_back(*grid.at(s)[ci]);
        } else {
          complete = false;
        }
      }
      if (!complete) continue;
      row.output = *target_row[ci];
      sc.case_indices.push_back(ci);
      sc.rows.push_back(std::move(row));
    }
    out.push_back(std::move(sc));
  }
  return out;
}

}  // namespace

std::vector<SyntheticCase> build_synthetic_cases(const Document& d, bool use_dependencies) {
  return synthetic_cases_for(d, make_plan(d, use_dependencies));
}

// ---- events ----------------------------------------------------------------

bool legal_transition(std::optional<ElementState> from, ElementState to) {
  if (!from) return to == ElementState::Pending;
  switch (*from) {
    case ElementState::Pending: return to == ElementState::Active;
    case ElementState::Active: return to == ElementState::Solved || to == ElementState::Failed;
    case ElementState::Failed: return to == ElementState::Active;
    case ElementState::Solved: return false;
  }
  return false;
}

namespace {

Json stats_json(const SearchStatistics& s, std::optional<SearchOutcome> outcome) {
  Json j = Json::object();
  j["candidates_expanded"] = s.candidates_expanded;
  Json per = Json::object();
  for (std::size_t i = 0; i < kKnowledgeSourceCount; ++i) {
    per[std::string(to_string(static_cast<KnowledgeSource>(i)))] = s.per_source[i];
  }
  j["per_source"] = std::move(per);
  j["max_tier"] = s.max_tier;
  j["hypotheses"] = s.hypotheses;
  j["elapsed_ms"] = s.elapsed_ms;
  if (outcome) j["outcome"] = std::string(to_string(*outcome));
  return j;
}

SearchStatistics stats_from_json(const Json& j, std::optional<SearchOutcome>& outcome) {
  SearchStatistics s;
  s.candidates_expanded = j.at("candidates_expanded").get<std::uint64_t>();
  if (j.contains("per_source")) {
    for (std::size_t i = 0; i < kKnowledgeSourceCount; ++i) {
      const std::string key(to_string(static_cast<KnowledgeSource>(i)));
      if (j["per_source"].contains(key)) s.per_source[i] = j["per_source"][key].get<std::uint64_t>();
    }
  }
  s.max_tier = j.value("max_tier", 0);
  s.hypotheses = j.value("hypotheses", std::size_t{0});
  s.elapsed_ms = j.value("elapsed_ms", 0.0);
  if (j.contains("outcome")) {
    const auto name = j["outcome"].get<std::string>();
    for (auto o : {SearchOutcome::Solved, SearchOutcome::CostLimit, SearchOutcome::CandidateBudget,
                   SearchOutcome::Timeout, SearchOutcome::Contradictory}) {
      if (to_string(o) == name) outcome = o;
    }
  }
  return s;
}

}  // namespace

std::string event_to_json(const CompileEvent& e) {
  Json j = Json::object();
  if (e.terminal) {
    j["result"] = e.success ? "success" : "failure";
    j["failed"] = e.failed;
    return j.dump();
  }
  j["identity"] = e.identity;
  j["state"] = std::string(to_string(e.state));
  j["ts"] = e.ts;
  if (e.stats) j["stats"] = stats_json(*e.stats, e.outcome);
  return j.dump();
}

CompileEvent event_from_json(std::string_view line) {
  CompileEvent e;
  try {
    const Json j = Json::parse(line);
    if (j.contains("result")) {
      e.terminal = true;
      const auto result = j.at("result").get<std::string>();
      if (result != "success" && result != "failure") throw std::invalid_argument("bad result '" + result + "'");
      e.success = result == "success";
      e.failed = j.at("failed").get<std::vector<IdentityId>>();
      return e;
    }
    e.identity = j.at("identity").get<IdentityId>();
    auto st = element_state_from_string(j.at("state").get<std::string>());
    if (!st) throw std::invalid_argument("bad state");
    e.state = *st;
    e.ts = j.at("ts").get<long long>();
    if (j.contains("stats")) e.stats = stats_from_json(j["stats"], e.outcome);
  } catch (const nlohmann::json::exception& ex) {
    throw std::invalid_argument(std::string("malformed event: ") + ex.what());
  }
  return e;
}

std::optional<std::string> check_event_stream(const std::vector<CompileEvent>& events) {
  std::map<IdentityId, ElementState> state;
  bool closed = false;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    const std::string at = "event " + std::to_string(i) + ": ";
    if (closed) return at + "record after the terminal record";
    if (e.terminal) {
      closed = true;
      std::set<IdentityId> failed;
      for (const auto& [id, s] : state) {
        if (s == ElementState::Pending || s == ElementState::Active) {
          return at + "identity " + std::to_string(id) + " never settled";
        }
        if (s == ElementState::Failed) failed.insert(id);
      }
      if (failed != std::set<IdentityId>(e.failed.begin(), e.failed.end())) {
        return at + "terminal failed list does not match the failed identities";
      }
      if (!e.success && failed.empty()) return at + "failure reported with nothing failed";
      continue;
    }
    auto it = state.find(e.identity);
    std::optional<ElementState> from;
    if (it != state.end()) from = it->second;
    if (!legal_transition(from, e.state)) {
      return at + "illegal transition " + (from ? std::string(to_string(*from)) : std::string("none")) + " -> " +
             std::string(to_string(e.state)) + " for identity " + std::to_string(e.identity);
    }
    state[e.identity] = e.state;
  }
  if (!closed) return std::string("stream has no terminal record");
  return std::nullopt;
}

// ---- pipelines -------------------------------------------------------------

namespace {

Json pipeline_json(const Pipeline& p) {
  Json j = Json::object();
  j["format"] = "zoea-pipeline/1";
  j["program"] = p.program;
  j["catalog_version"] = p.catalog_version;
  j["inputs"] = p.inputs;
  j["outputs"] = p.outputs;
  Json labels = Json::object();
  for (const auto& [id, text] : p.labels) labels[std::to_string(id)] = text;
  j["labels"] = std::move(labels);
  Json data = Json::object();
  for (const auto& [id, v] : p.data) data[std::to_string(id)] = to_njson(v);
  j["data"] = std::move(data);
  Json frags = Json::array();
  for (const auto& f : p.fragments) {
    frags.push_back(Json{{"identity", f.identity}, {"sources", f.sources}, {"expr", canonical_serialization(f.expr)}});
  }
  j["fragments"] = std::move(frags);
  Json imports = Json::object();
  for (const auto& [name, sub] : p.imports) imports[name] = pipeline_json(*sub);
  j["imports"] = std::move(imports);
  return j;
}

IdentityId id_key(const std::string& s) {
  std::size_t used = 0;
  const auto v = std::stoull(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad identity key");
  return v;
}

Pipeline pipeline_from(const Json& j) {
  if (j.at("format").get<std::string>() != "zoea-pipeline/1") throw std::invalid_argument("unknown pipeline format");
  Pipeline p;
  p.program = j.at("program").get<std::string>();
  p.catalog_version = j.at("catalog_version").get<std::string>();
  if (p.catalog_version != kCatalogVersion) {
    throw std::invalid_argument("pipeline built against catalog " + p.catalog_version);
  }
  p.inputs = j.at("inputs").get<std::vector<IdentityId>>();
  p.outputs = j.at("outputs").get<std::vector<IdentityId>>();
  for (auto it = j.at("labels").begin(); it != j.at("labels").end(); ++it) {
    p.labels[id_key(it.key())] = it.value().get<std::string>();
  }
  for (auto it = j.at("data").begin(); it != j.at("data").end(); ++it) {
    p.data[id_key(it.key())] = from_njson(it.value());
  }
  for (const auto& f : j.at("fragments")) {
    p.fragments.push_back(Fragment{f.at("identity").get<IdentityId>(), f.at("sources").get<std::vector<IdentityId>>(),
                                   parse_expr(f.at("expr").get<std::string>())});
  }
  for (auto it = j.at("imports").begin(); it != j.at("imports").end(); ++it) {
    p.imports.emplace(it.key(), std::make_shared<const Pipeline>(pipeline_from(it.value())));
  }
  return p;
}

}  // namespace

std::string pipeline_to_json(const Pipeline& p, int indent) { return pipeline_json(p).dump(indent); }

Pipeline pipeline_from_json(std::string_view text) {
  try {
    return pipeline_from(Json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw CompileError(CompileError::Code::BadPipeline, std::string("malformed pipeline: ") + e.what());
  } catch (const ExprParseError& e) {
    throw CompileError(CompileError::Code::BadPipeline, std::string("bad fragment: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw CompileError(CompileError::Code::BadPipeline, e.what());
  } catch (const ValueError& e) {
    throw CompileError(CompileError::Code::BadPipeline, std::string("bad data value: ") + e.what());
  }
}

ImportTable import_table(const PipelineLibrary& library) {
  ImportTable table;
  for (const auto& [name, pipeline] : library) {
    std::shared_ptr<const Pipeline> p = pipeline;
    Import imp;
    imp.name = name;
    imp.arity = p->inputs.size();
    imp.call = [p](std::span<const Value> args) -> EvalResult {
      try {
        auto outs = run_pipeline(*p, args);
        if (outs.size() == 1) return std::move(outs.front());
        return Value::list(std::move(outs));
      } catch (const RunError&) {
        return EvalError{EvalErrorKind::ImportFailed, "imported program failed", {}};
      }
    };
    table.emplace(name, std::move(imp));
  }
  return table;
}

namespace {

/// Evaluates fragments whose sources are bound; returns the environment.
/// With `strict`, a fragment that cannot run is a RunError.
std::map<IdentityId, Value> evaluate(const Pipeline& p, std::map<IdentityId, Value> env, bool strict) {
  const ImportTable imports = import_table(p.imports);
  std::vector<Value> args;
  for (const auto& f : p.fragments) {
    args.clear();
    bool ready = true;
    for (IdentityId s : f.sources) {
      auto it = env.find(s);
      if (it == env.end()) {
        ready = false;
        break;
      }
      args.push_back(it->second);
    }
    if (!ready) {
      if (strict) throw RunError(RunError::Code::MissingData, f.identity, "a source of this step has no value");
      continue;
    }
    EvalResult r = eval(f.expr, args, &imports);
    if (!r.ok()) {
      if (!strict) continue;
      throw RunError(RunError::Code::Eval, f.identity,
                     "step for identity " + std::to_string(f.identity) + " failed: " +
                         std::string(to_string(r.error().kind)) + " (" + std::string(r.error().detail) + ")");
    }
    env[f.identity] = std::move(r.value());
  }
  return env;
}

}  // namespace

std::vector<Value> run_pipeline(const Pipeline& p, std::span<const Value> inputs,
                                const std::map<IdentityId, Value>& runtime) {
  if (inputs.size() != p.inputs.size()) {
    throw RunError(RunError::Code::ArityMismatch, 0,
                   "expected " + std::to_string(p.inputs.size()) + " inputs, got " + std::to_string(inputs.size()));
  }
  std::map<IdentityId, Value> env;
  for (std::size_t i = 0; i < inputs.size(); ++i) env[p.inputs[i]] = inputs[i];
  for (const auto& [id, v] : p.data) {
    auto it = runtime.find(id);
    env[id] = it != runtime.end() ? it->second : v;
  }
  env = evaluate(p, std::move(env), true);
  std::vector<Value> out;
  for (IdentityId id : p.outputs) {
    auto it = env.find(id);
    if (it == env.end()) throw RunError(RunError::Code::MissingData, id, "output was not computed");
    out.push_back(it->second);
  }
  return out;
}

std::vector<Value> run_pipeline(const Pipeline& p, std::span<const Value> inputs, const Document& d) {
  return run_pipeline(p, inputs, d.runtime);
}

bool replays_document(const Pipeline& p, const Document& d) {
  const auto grid = value_grid(d);
  for (std::size_t ci = 0; ci < d.cases.size(); ++ci) {
    std::map<IdentityId, Value> env;
    for (IdentityId id : p.inputs) {
      auto it = grid.find(id);
      if (it != grid.end() && it->second[ci]) env[id] = *it->second[ci];
    }
    for (const auto& [id, v] : p.data) env[id] = v;
    env = evaluate(p, std::move(env), false);
    for (IdentityId id : p.outputs) {
      auto it = grid.find(id);
      if (it == grid.end() || !it->second[ci]) continue;
      auto got = env.find(id);
      if (got == env.end() || !deep_equal(got->second, *it->second[ci])) return false;
    }
  }
  return true;
}

// ---- compilation -----------------------------------------------------------

CompileReport compile_document(const Document& d, const SearchConfig& config, const EventSink& sink,
                               const PipelineLibrary& library, bool use_dependencies) {
  require_valid(d);
  check_config(config);
  PipelineLibrary used;
  for (const auto& name : d.uses) {
    auto it = library.find(name);
    if (it == library.end()) {
      throw CompileError(CompileError::Code::UnresolvedUse, "program '" + name + "' is not available to use");
    }
    used.emplace(name, it->second);
  }
  const ImportTable imports = import_table(used);
  const auto start = std::chrono::steady_clock::now();

  const CompilationPlan plan = make_plan(d, use_dependencies);
  const auto cases = synthetic_cases_for(d, plan);
  auto emit = [&](CompileEvent e) {
    e.ts = now_ms();
    if (sink) sink(e);
  };

  CompileReport report;
  for (IdentityId id : plan.order) emit(status(id, ElementState::Pending));

  std::set<IdentityId> failed;
  std::vector<Fragment> fragments;
  for (const auto& sc : cases) {
    emit(status(sc.target, ElementState::Active));
    const bool blocked =
        std::any_of(sc.sources.begin(), sc.sources.end(), [&](IdentityId s) { return failed.count(s) > 0; });
    if (blocked) {
      // Downstream of a failure: no search.
      SearchStatistics none;
      report.stats[sc.target] = none;
      failed.insert(sc.target);
      emit(status(sc.target, ElementState::Failed, none));
      continue;
    }
    SynthesisProblem problem;
    problem.arity = sc.sources.size();
    problem.cases = sc.rows;
    problem.imports = imports;
    SynthesisResult r = synthesize(problem, config);
    report.stats[sc.target] = r.stats;
    report.candidates_expanded += r.stats.candidates_expanded;
    if (r.ok()) {
      fragments.push_back(Fragment{sc.target, sc.sources, *r.solution});
      emit(status(sc.target, ElementState::Solved, r.stats, r.outcome));
    } else {
      failed.insert(sc.target);
      emit(status(sc.target, ElementState::Failed, r.stats, r.outcome));
    }
  }

  report.failed.assign(failed.begin(), failed.end());
  report.success = std::none_of(plan.outputs.begin(), plan.outputs.end(), [&](IdentityId o) { return failed.count(o); });
  if (report.success) {
    Pipeline p;
    p.program = d.name;
    p.catalog_version = std::string(kCatalogVersion);
    p.inputs = plan.inputs;
    p.outputs = plan.outputs;
    for (IdentityId id : plan.data) p.data.emplace(id, *data_test_value(d, id));
    for (const auto& [id, text] : labels(d)) p.labels.emplace(id, text);
    p.fragments = std::move(fragments);
    p.imports = used;
    if (!replays_document(p, d)) {
      throw std::logic_error("compiled pipeline for '" + d.name + "' does not replay its cases");
    }
    report.pipeline = std::move(p);
  }
  report.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  CompileEvent done;
  done.terminal = true;
  done.success = report.success;
  done.failed = report.failed;
  emit(done);
  return report;
}

CompileReport compile_zoea_text(const ZoeaProgram& p, const SearchConfig& config, const EventSink& sink,
                                const PipelineLibrary& library) {
  auto diags = validate_zoea(p);
  if (has_errors(diags)) {
    std::string msg = "program '" + p.name + "' is not valid";
    for (const auto& x : diags) {
      if (x.severity == Severity::Error) msg += "\n  " + format(x);
    }
    throw CompileError(CompileError::Code::ValidationFailed, msg, std::move(diags));
  }
  for (const auto& c : p.cases) {
    if (c.derives.size() != p.cases.front().derives.size()) {
      throw CompileError(CompileError::Code::UnequalDerives,
                         "every case needs the same number of derive steps to compile as a chain");
    }
  }
  return compile_document(import_zoea(p, ImportMode::Steps), config, sink, library);
}

}  // namespace zoea
