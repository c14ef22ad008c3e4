// Python bindings. Values cross the boundary as JSON text; the zoea package
// turns them into Python objects.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "zoea/catalog.hpp"
#include "zoea/compiler.hpp"
#include "zoea/document.hpp"
#include "zoea/json_bridge.hpp"
#include "zoea/zoea_text.hpp"

namespace py = pybind11;
using namespace zoea;

namespace {

SearchConfig config(int max_cost, std::uint64_t timeout_ms, std::uint64_t max_candidates) {
  SearchConfig c;
  c.max_cost = max_cost;
  c.timeout_ms = timeout_ms;
  c.max_candidates = max_candidates;
  check_config(c);
  return c;
}

std::vector<Value> values_of(const std::string& json_array) {
  const Value v = from_json(json_array);
  if (v.kind() != ValueKind::List) throw std::invalid_argument("expected a JSON array of values");
  return v.items();
}

/// {success, failed, events, pipeline}
std::string compile_json(const CompileReport& r, const std::vector<std::string>& events) {
  Json j = Json::object();
  j["success"] = r.success;
  j["failed"] = r.failed;
  j["candidates_expanded"] = r.candidates_expanded;
  Json evs = Json::array();
  for (const auto& e : events) evs.push_back(Json::parse(e));
  j["events"] = std::move(evs);
  j["pipeline"] = r.pipeline ? Json::parse(pipeline_to_json(*r.pipeline)) : Json(nullptr);
  return j.dump();
}

}  // namespace

PYBIND11_MODULE(_zoea, m) {
  m.doc() = "Zoea inductive programming core";

  static py::exception<ZoeaParseError> parse_error(m, "ParseError", PyExc_ValueError);
  static py::exception<CompileError> compile_error(m, "CompileError", PyExc_ValueError);
  static py::exception<DocumentError> document_error(m, "DocumentError", PyExc_ValueError);
  static py::exception<RunError> run_error(m, "RunError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ZoeaParseError& e) {
      const std::string msg =
          "line " + std::to_string(e.line()) + ": " + std::string(to_string(e.kind())) + ": " + e.detail();
      py::set_error(parse_error, msg.c_str());
    } catch (const CompileError& e) {
      py::set_error(compile_error, e.what());
    } catch (const DocumentError& e) {
      py::set_error(document_error, e.what());
    } catch (const RunError& e) {
      py::set_error(run_error, e.what());
    } catch (const ValueError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.attr("catalog_version") = std::string(kCatalogVersion);
  m.def("catalog", [] {
    std::vector<std::string> names;
    for (const auto& p : catalog_v1()) names.emplace_back(p.name);
    return names;
  });

  m.def("format_zoea", [](const std::string& src) { return print_zoea(parse_zoea(src)); },
        "Parse .zoea text and print it in canonical layout.");

  m.def("validate_zoea", [](const std::string& src) {
    std::vector<std::tuple<std::string, std::string, std::string>> out;
    for (const auto& d : validate_zoea(parse_zoea(src))) {
      out.emplace_back(std::string(to_string(d.severity)), d.code, d.message);
    }
    return out;
  });

  m.def("import_zoea", [](const std::string& src, const std::string& mode) {
    if (mode != "steps" && mode != "list") throw std::invalid_argument("mode is 'steps' or 'list'");
    return document_to_json(import_zoea(parse_zoea(src), mode == "steps" ? ImportMode::Steps : ImportMode::ListWrapped));
  }, py::arg("source"), py::arg("mode") = "steps");

  m.def("export_document", [](const std::string& doc) { return print_zoea(export_to_zoea(document_from_json(doc))); });

  m.def("synthesize",
        [](const std::string& cases_json, const std::string& constants_json, int max_cost, std::uint64_t timeout_ms,
           std::uint64_t max_candidates) -> py::object {
          SynthesisProblem p;
          for (const Value& row : values_of(cases_json)) {
            if (row.kind() != ValueKind::List || row.items().size() != 2 || row.items()[0].kind() != ValueKind::List) {
              throw std::invalid_argument("each case is [[inputs...], output]");
            }
            p.cases.push_back(SynthesisCase{row.items()[0].items(), row.items()[1]});
          }
          if (p.cases.empty()) throw std::invalid_argument("no cases");
          p.arity = p.cases.front().inputs.size();
          p.constants_pool = values_of(constants_json);
          SynthesisResult r;
          {
            py::gil_scoped_release release;
            r = synthesize(p, config(max_cost, timeout_ms, max_candidates));
          }
          if (!r.ok()) return py::none();
          return py::str(canonical_serialization(*r.solution));
        },
        py::arg("cases"), py::arg("constants") = "[]", py::arg("max_cost") = SearchConfig{}.max_cost,
        py::arg("timeout_ms") = SearchConfig{}.timeout_ms, py::arg("max_candidates") = SearchConfig{}.max_candidates);

  m.def("compile_text",
        [](const std::string& src, int max_cost, std::uint64_t timeout_ms, std::uint64_t max_candidates) {
          const ZoeaProgram p = parse_zoea(src);
          const SearchConfig c = config(max_cost, timeout_ms, max_candidates);
          std::vector<std::string> events;
          CompileReport r;
          {
            py::gil_scoped_release release;
            r = compile_zoea_text(p, c, [&](const CompileEvent& e) { events.push_back(event_to_json(e)); });
          }
          return compile_json(r, events);
        },
        py::arg("source"), py::arg("max_cost") = SearchConfig{}.max_cost,
        py::arg("timeout_ms") = SearchConfig{}.timeout_ms, py::arg("max_candidates") = SearchConfig{}.max_candidates);

  m.def("run_pipeline", [](const std::string& pipeline, const std::string& inputs_json) {
    const Pipeline p = pipeline_from_json(pipeline);
    const std::vector<Value> inputs = values_of(inputs_json);
    Json out = Json::array();
    for (const auto& v : run_pipeline(p, inputs)) out.push_back(to_njson(v));
    return out.dump();
  });

  m.def("eval_expr", [](const std::string& expr, const std::string& inputs_json) {
    const std::vector<Value> inputs = values_of(inputs_json);
    const EvalResult r = eval(parse_expr(expr), inputs);
    if (!r.ok()) {
      throw std::runtime_error(std::string(to_string(r.error().kind)) + ": " + std::string(r.error().detail));
    }
    return to_json(r.value());
  });
}
