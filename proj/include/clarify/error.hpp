#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>

namespace clarify {

// Malformed input (corpus lines, queries, JSON bodies).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A domain invariant was violated by caller-supplied data.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotFoundError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Operation not allowed in the current state (e.g. answering a finished session).
class ConflictError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Every candidate received zero posterior mass.
class DegenerateEvidenceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Failure talking to an HTTP backend (chat model, embedder, question endpoint).
class TransportError : public std::runtime_error {
 public:
  TransportError(const std::string& what, int status = 0,
                 std::optional<std::chrono::milliseconds> retry_after = std::nullopt)
      : std::runtime_error(what), status_(status), retry_after_(retry_after) {}

  int status() const noexcept { return status_; }
  std::optional<std::chrono::milliseconds> retry_after() const noexcept { return retry_after_; }

 private:
  int status_;
  std::optional<std::chrono::milliseconds> retry_after_;
};

// A generative role (generator, answerer, summarizer) could not produce output.
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace clarify
