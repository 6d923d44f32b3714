#include "clarify/chat_client.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "clarify/error.hpp"
#include "clarify/http_json.hpp"

namespace clarify {

std::string api_key_from_env() {
  const char* key = std::getenv("ORACLE_API_KEY");
  return key ? std::string(key) : std::string();
}

HttpChatClient::HttpChatClient(const OracleConfig& config, std::string api_key)
    : endpoint_(config.endpoint),
      model_(config.model),
      api_key_(std::move(api_key)),
      timeout_ms_(config.timeout_ms),
      retries_(config.retries),
      backoff_ms_(config.backoff_ms),
      slots_(std::clamp(config.max_concurrency, 1, 1024)) {}

namespace {
bool retryable(const TransportError& e) { return e.status() == 0 || e.status() == 429 || e.status() >= 500; }
}  // namespace

std::string HttpChatClient::complete(const std::vector<ChatMessage>& messages, double temperature) const {
  nlohmann::json body{{"model", model_}, {"temperature", temperature}, {"messages", nlohmann::json::array()}};
  for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  HttpRequestOptions options;
  options.timeout = std::chrono::milliseconds(timeout_ms_);
  options.bearer_token = api_key_;

  for (int attempt = 0;; ++attempt) {
    try {
      slots_.acquire();
      nlohmann::json reply;
      try {
        reply = post_json(endpoint_, "/chat/completions", body, options);
      } catch (...) {
        slots_.release();
        throw;
      }
      slots_.release();
      const auto& choices = reply.at("choices");
      if (!choices.is_array() || choices.empty()) throw TransportError("chat reply has no choices");
      return choices[0].at("message").at("content").get<std::string>();
    } catch (const TransportError& e) {
      if (attempt >= retries_ || !retryable(e)) throw;
      auto wait = e.retry_after().value_or(std::chrono::milliseconds(backoff_ms_ << std::min(attempt, 10)));
      spdlog::warn("chat request failed ({}); retry {}/{} in {} ms", e.what(), attempt + 1, retries_, wait.count());
      std::this_thread::sleep_for(wait);
    } catch (const nlohmann::json::exception& e) {
      throw TransportError(fmt::format("malformed chat reply: {}", e.what()));
    }
  }
}

}  // namespace clarify
