#include "zoea/http_service.hpp"

#include <httplib.h>

#include "zoea/json_bridge.hpp"

namespace zoea {

int http_status(WorkspaceError::Code code) {
  using C = WorkspaceError::Code;
  switch (code) {
    case C::NotFound: return 404;
    case C::AlreadyExists:
    case C::RevisionConflict:
    case C::InUse:
    case C::AlreadyCompiling:
    case C::NotCompiled:
    case C::StalePipeline: return 409;
    case C::ValidationFailed:
    case C::CycleDetected:
    case C::RunFailed: return 422;
    case C::InvalidId:
    case C::BadRequest: return 400;
  }
  return 500;
}

namespace {

void send_json(httplib::Response& res, const Json& j, int status = 200) {
  res.status = status;
  res.set_content(j.dump(), "application/json");
}

void send_error(httplib::Response& res, const WorkspaceError& e) {
  send_json(res, Json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}, {"details", e.details()}},
            http_status(e.code()));
}

Json program_json(const StoredProgram& p) {
  return Json{{"id", p.id},
              {"revision", p.revision},
              {"compiled", p.pipeline.has_value() && p.pipeline_revision == p.revision},
              {"document", Json::parse(document_to_json(p.document))}};
}

Json parse_body(const httplib::Request& req) {
  try {
    return Json::parse(req.body);
  } catch (const nlohmann::json::exception& e) {
    throw WorkspaceError(WorkspaceError::Code::BadRequest, std::string("request body is not JSON: ") + e.what());
  }
}

Document document_in(const Json& j) {
  try {
    return document_from_json(j.dump());
  } catch (const DocumentError& e) {
    throw WorkspaceError(WorkspaceError::Code::BadRequest, e.what());
  }
}

/// Runs a handler, mapping workspace and unexpected errors to responses.
template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const WorkspaceError& e) {
      send_error(res, e);
    } catch (const nlohmann::json::exception& e) {
      send_error(res, WorkspaceError(WorkspaceError::Code::BadRequest, e.what()));
    } catch (const ValueError& e) {
      send_error(res, WorkspaceError(WorkspaceError::Code::BadRequest, e.what()));
    } catch (const std::exception& e) {
      send_json(res, Json{{"error", "Internal"}, {"message", e.what()}, {"details", Json::array()}}, 500);
    }
  };
}

}  // namespace

struct HttpService::Impl {
  explicit Impl(Workspace& w) : ws(w) {}
  Workspace& ws;
  httplib::Server server;
};

HttpService::HttpService(Workspace& ws) : impl_(std::make_unique<Impl>(ws)) {
  auto& srv = impl_->server;
  Workspace& w = ws;

  srv.Get("/programs", guarded([&w](const httplib::Request&, httplib::Response& res) {
    Json arr = Json::array();
    for (const auto& s : w.list()) arr.push_back(Json{{"id", s.id}, {"revision", s.revision}, {"compiled", s.compiled}});
    send_json(res, arr);
  }));

  srv.Post("/programs", guarded([&w](const httplib::Request& req, httplib::Response& res) {
    auto p = w.create(document_in(parse_body(req)));
    send_json(res, Json{{"id", p.id}, {"revision", p.revision}}, 201);
  }));

  srv.Get(R"(/programs/([^/]+))", guarded([&w](const httplib::Request& req, httplib::Response& res) {
    send_json(res, program_json(w.get(req.matches[1])));
  }));

  srv.Put(R"(/programs/([^/]+))", guarded([&w](const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    if (!body.contains("revision") || !body.contains("document")) {
      throw WorkspaceError(WorkspaceError::Code::BadRequest, "body needs 'revision' and 'document'");
    }
    auto p = w.put(req.matches[1], document_in(body["document"]), body["revision"].get<std::uint64_t>());
    send_json(res, Json{{"id", p.id}, {"revision", p.revision}});
  }));

  srv.Delete(R"(/programs/([^/]+))", guarded([&w](const httplib::Request& req, httplib::Response& res) {
    w.remove(req.matches[1]);
    res.status = 204;
  }));

  srv.Post(R"(/programs/([^/]+)/compile)", guarded([&w](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    std::shared_ptr<CompileLease> lease = w.acquire_compile(id);
    w.check_compilable(id);
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "text/event-stream",
        [&w, lease](std::size_t, httplib::DataSink& sink) {
          auto write = [&sink](const std::string& line) {
            const std::string frame = "data: " + line + "\n\n";
            sink.write(frame.data(), frame.size());
          };
          try {
            w.compile(*lease, [&](const CompileEvent& e) { write(event_to_json(e)); });
          } catch (const WorkspaceError& e) {
            write(Json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}}.dump());
          } catch (const std::exception& e) {
            write(Json{{"error", "Internal"}, {"message", e.what()}}.dump());
          }
          sink.done();
          return true;
        },
        [lease](bool) {});
  }));

  srv.Post(R"(/programs/([^/]+)/run)", guarded([&w](const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    if (!body.contains("inputs") || !body["inputs"].is_array()) {
      throw WorkspaceError(WorkspaceError::Code::BadRequest, "body needs an 'inputs' array");
    }
    std::vector<Value> inputs;
    for (const auto& v : body["inputs"]) inputs.push_back(from_njson(v));
    const RunOutput out = w.run(req.matches[1], inputs);
    Json outputs = Json::array();
    for (const auto& v : out.outputs) outputs.push_back(to_njson(v));
    send_json(res, Json{{"outputs", outputs}, {"input_labels", out.input_labels}, {"output_labels", out.output_labels}});
  }));

  srv.Get(R"(/programs/([^/]+)/uses)", guarded([&w](const httplib::Request& req, httplib::Response& res) {
    Json arr = Json::array();
    for (const auto& u : w.uses(req.matches[1])) {
      arr.push_back(Json{{"program", u.program}, {"compiled", u.compiled}, {"selected", u.selected}});
    }
    send_json(res, arr);
  }));

  srv.Put(R"(/programs/([^/]+)/uses)", guarded([&w](const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    if (!body.contains("uses") || !body["uses"].is_array()) {
      throw WorkspaceError(WorkspaceError::Code::BadRequest, "body needs a 'uses' array");
    }
    auto p = w.set_uses(req.matches[1], body["uses"].get<std::vector<std::string>>());
    send_json(res, Json{{"id", p.id}, {"revision", p.revision}, {"uses", p.document.uses}});
  }));

  srv.Get(R"(/programs/([^/]+)/export)", guarded([&w](const httplib::Request& req, httplib::Response& res) {
    res.set_content(w.export_text(req.matches[1]), "text/plain; charset=utf-8");
  }));
}

HttpService::~HttpService() { stop(); }

int HttpService::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }
bool HttpService::bind(const std::string& host, int port) { return impl_->server.bind_to_port(host, port); }
bool HttpService::listen_after_bind() { return impl_->server.listen_after_bind(); }
void HttpService::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}
void HttpService::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace zoea
