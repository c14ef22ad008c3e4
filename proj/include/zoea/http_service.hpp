#pragma once

#include <memory>
#include <string>

#include "zoea/workspace.hpp"

namespace zoea {

/// HTTP+JSON front end of a Workspace.
///
///   GET/POST          /programs
///   GET/PUT/DELETE    /programs/{id}
///   POST              /programs/{id}/compile   (text/event-stream)
///   POST              /programs/{id}/run
///   GET/PUT           /programs/{id}/uses
///   GET               /programs/{id}/export
class HttpService {
 public:
  explicit HttpService(Workspace& ws);
  ~HttpService();

  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds to a free port and returns it (-1 on failure).
  int bind_any_port(const std::string& host);
  bool bind(const std::string& host, int port);
  /// Blocks serving requests until stop().
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// HTTP status used for each workspace error.
int http_status(WorkspaceError::Code code);

}  // namespace zoea
