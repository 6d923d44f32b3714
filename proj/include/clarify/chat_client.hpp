#pragma once

#include <memory>
#include <semaphore>
#include <string>
#include <vector>

#include "clarify/config.hpp"

namespace clarify {

struct ChatMessage {
  std::string role;
  std::string content;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  /// Content of the first choice. Thread-safe.
  virtual std::string complete(const std::vector<ChatMessage>& messages, double temperature) const = 0;
};

/// OpenAI-style POST {endpoint}/chat/completions.
///
/// In-flight requests are capped at `max_concurrency` across all callers sharing
/// the client. Transport failures, 429 and 5xx replies are retried `retries`
/// times with exponential backoff (a Retry-After header takes precedence).
class HttpChatClient final : public ChatClient {
 public:
  HttpChatClient(const OracleConfig& config, std::string api_key);
  std::string complete(const std::vector<ChatMessage>& messages, double temperature) const override;

 private:
  std::string endpoint_;
  std::string model_;
  std::string api_key_;
  int timeout_ms_;
  int retries_;
  int backoff_ms_;
  mutable std::counting_semaphore<1024> slots_;
};

/// Reads ORACLE_API_KEY; empty when unset.
std::string api_key_from_env();

}  // namespace clarify
