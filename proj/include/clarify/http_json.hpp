#pragma once

#include <chrono>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

namespace clarify {

/// Splits "http://host:port/base" into ("http://host:port", "/base").
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint);

struct HttpRequestOptions {
  std::chrono::milliseconds timeout{60000};
  std::string bearer_token;
};

/// POSTs a JSON body to endpoint + path and parses the JSON reply.
/// Non-2xx replies and transport failures throw TransportError; Retry-After is captured.
nlohmann::json post_json(const std::string& endpoint, const std::string& path, const nlohmann::json& body,
                         const HttpRequestOptions& options = {});

}  // namespace clarify
