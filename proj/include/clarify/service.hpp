#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "clarify/session.hpp"

namespace httplib {
class Server;
}

namespace clarify {

/// REST front end over a SessionStore.
///   POST /api/sessions             {query, selector?, posterior?, seed?}
///   POST /api/sessions/{id}/answer {answer, accept_id?, turn?}
///   GET  /api/sessions/{id}
///   GET  /api/health
/// plus static files from `webui_dir` at "/" when the directory exists.
/// Errors are {"error": message} with 400/404/409/502.
class Service {
 public:
  Service(SessionStore& store, std::filesystem::path webui_dir = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and serves until stop(). Port 0 picks a free port (see port()).
  bool bind(const std::string& host, int port);
  void serve();
  void stop();
  int port() const noexcept { return port_; }

 private:
  SessionStore* store_;
  std::unique_ptr<httplib::Server> server_;
  int port_ = 0;
};

}  // namespace clarify
