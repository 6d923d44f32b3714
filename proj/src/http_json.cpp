#include "clarify/http_json.hpp"

#include <fmt/format.h>
#include <httplib.h>

#include "clarify/error.hpp"

namespace clarify {

std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  const auto scheme_end = endpoint.find("://");
  const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_start = endpoint.find('/', host_start);
  if (path_start == std::string::npos) return {endpoint, ""};
  std::string base = endpoint.substr(path_start);
  while (!base.empty() && base.back() == '/') base.pop_back();
  return {endpoint.substr(0, path_start), base};
}

nlohmann::json post_json(const std::string& endpoint, const std::string& path, const nlohmann::json& body,
                         const HttpRequestOptions& options) {
  if (endpoint.empty()) throw TransportError("no endpoint configured");
  const auto [origin, base] = split_endpoint(endpoint);
  httplib::Client client(origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers headers;
  if (!options.bearer_token.empty()) headers.emplace("Authorization", "Bearer " + options.bearer_token);

  const auto target = base + path;
  auto res = client.Post(target, headers, body.dump(), "application/json");
  if (!res) throw TransportError(fmt::format("POST {}{}: {}", origin, target, httplib::to_string(res.error())));
  if (res->status < 200 || res->status >= 300) {
    std::optional<std::chrono::milliseconds> retry_after;
    if (res->has_header("Retry-After")) {
      try {
        retry_after = std::chrono::seconds(std::stol(res->get_header_value("Retry-After")));
      } catch (const std::exception&) {
        // HTTP-date form is not interpreted.
      }
    }
    throw TransportError(fmt::format("POST {}{} returned HTTP {}", origin, target, res->status), res->status,
                         retry_after);
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw TransportError(fmt::format("POST {}{}: malformed JSON reply: {}", origin, target, e.what()), res->status);
  }
}

}  // namespace clarify
