#include "clarify/service.hpp"

#include <httplib.h>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "clarify/error.hpp"

namespace clarify {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const json::exception& e) {
      send_json(res, 400, {{"error", fmt::format("bad request body: {}", e.what())}});
    } catch (const ParseError& e) {
      send_json(res, 400, {{"error", e.what()}});
    } catch (const ValidationError& e) {
      send_json(res, 400, {{"error", e.what()}});
    } catch (const NotFoundError& e) {
      send_json(res, 404, {{"error", e.what()}});
    } catch (const ConflictError& e) {
      send_json(res, 409, {{"error", e.what()}});
    } catch (const OracleError& e) {
      send_json(res, 502, {{"error", e.what()}});
    } catch (const TransportError& e) {
      send_json(res, 502, {{"error", e.what()}});
    } catch (const std::exception& e) {
      spdlog::error("{} {}: {}", req.method, req.path, e.what());
      send_json(res, 500, {{"error", "internal error"}});
    }
  };
}

json parse_body(const httplib::Request& req) {
  auto body = json::parse(req.body);
  if (!body.is_object()) throw ValidationError("request body must be a JSON object");
  return body;
}

}  // namespace

Service::Service(SessionStore& store, std::filesystem::path webui_dir)
    : store_(&store), server_(std::make_unique<httplib::Server>()) {
  auto& s = *server_;

  s.Get("/api/health", guarded([this](const httplib::Request&, httplib::Response& res) {
          send_json(res, 200, {{"status", "ok"}, {"sessions", store_->ids().size()}});
        }));

  s.Post("/api/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
           const auto body = parse_body(req);
           CreateRequest request;
           request.query = body.value("query", "");
           if (body.contains("selector") && !body["selector"].is_null())
             request.selector = parse_selector_kind(body["selector"].get<std::string>());
           if (body.contains("posterior") && !body["posterior"].is_null())
             request.mode = parse_posterior_mode(body["posterior"].get<std::string>());
           if (body.contains("seed") && !body["seed"].is_null()) request.seed = body["seed"].get<std::uint64_t>();
           const auto state = store_->create(request);
           auto out = store_->view(state);
           send_json(res, 201, out);
         }));

  s.Post(R"(/api/sessions/([0-9a-f]+)/answer)",
         guarded([this](const httplib::Request& req, httplib::Response& res) {
           const auto body = parse_body(req);
           AnswerRequest request;
           request.answer = body.value("answer", "");
           if (body.contains("accept_id") && !body["accept_id"].is_null())
             request.accept_id = body["accept_id"].get<std::string>();
           if (body.contains("turn") && !body["turn"].is_null()) request.turn = body["turn"].get<int>();
           const auto state = store_->submit_answer(req.matches[1], request);
           send_json(res, 200, store_->view(state));
         }));

  s.Get(R"(/api/sessions/([0-9a-f]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
          send_json(res, 200, store_->view(store_->get(req.matches[1])));
        }));

  if (!webui_dir.empty()) {
    if (std::filesystem::is_directory(webui_dir)) {
      s.set_mount_point("/", webui_dir.string());
    } else {
      spdlog::warn("web UI directory {} not found; serving the API only", webui_dir.string());
    }
  }
}

Service::~Service() { stop(); }

bool Service::bind(const std::string& host, int port) {
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
    return port_ > 0;
  }
  port_ = port;
  return server_->bind_to_port(host, port);
}

void Service::serve() { server_->listen_after_bind(); }

void Service::stop() {
  if (server_ && server_->is_running()) server_->stop();
}

}  // namespace clarify
