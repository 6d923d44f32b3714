#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "clarify/engine.hpp"
#include "clarify/types.hpp"

namespace clarify {

enum class SessionStatus { active, done, failed };
std::string_view to_string(SessionStatus status);
SessionStatus parse_session_status(std::string_view text);

struct SessionState {
  std::string id;
  InteractionHistory history;
  std::vector<double> belief;
  SelectorKind selector = SelectorKind::eig;
  PosteriorMode mode = PosteriorMode::language;
  std::uint64_t seed = 0;
  int turn = 1;
  SessionStatus status = SessionStatus::active;
  std::string question;  // pending question; empty unless active
  std::string accepted_id;
  std::string failure;
  std::string created_at;
  std::string updated_at;

  bool operator==(const SessionState&) const = default;
};

nlohmann::json session_to_json(const SessionState& state);
SessionState session_from_json(const nlohmann::json& j);

struct CreateRequest {
  std::string query;
  std::optional<SelectorKind> selector;
  std::optional<PosteriorMode> mode;
  std::optional<std::uint64_t> seed;
};

struct AnswerRequest {
  std::string answer;
  std::optional<std::string> accept_id;
  std::optional<int> turn;  // when set, must equal the session's current turn
};

struct SessionOptions {
  int max_turns = 10;
  int pool_size = 10;
  SelectorKind selector = SelectorKind::eig;
  std::filesystem::path data_dir;  // empty: in memory only
};

/// Thread-safe session registry. Mutations of one session are serialized;
/// readers always see a complete snapshot. With a data directory every state
/// change is appended to <data_dir>/<id>.jsonl and sessions are restored from
/// those logs on construction.
class SessionStore {
 public:
  SessionStore(const Engine& engine, SessionOptions options);

  /// Retrieves on the query and picks the first question. Throws ValidationError
  /// on an empty query; oracle failures are rethrown after the failed session is stored.
  SessionState create(const CreateRequest& request);
  /// Throws NotFoundError, ConflictError (inactive session or turn mismatch),
  /// ValidationError (empty answer, unknown accept_id) and oracle errors.
  SessionState submit_answer(const std::string& id, const AnswerRequest& request);
  SessionState get(const std::string& id) const;
  std::vector<std::string> ids() const;

  /// Public view: candidates (top_candidates rule), history, status, question.
  nlohmann::json view(const SessionState& state) const;
  nlohmann::json candidates_json(const SessionState& state) const;

  const SessionOptions& options() const noexcept { return options_; }

 private:
  struct Entry {
    std::mutex update;  // held for a whole mutation, oracle calls included
    mutable std::mutex snapshot_mutex;
    std::shared_ptr<const SessionState> snapshot;
  };

  std::shared_ptr<Entry> entry(const std::string& id) const;
  void publish(Entry& entry, SessionState state, std::string_view event);
  std::string next_question(const SessionState& state, const BeliefDistribution& belief) const;
  void restore();

  const Engine* engine_;
  SessionOptions options_;
  mutable std::shared_mutex map_mutex_;
  std::unordered_map<std::string, std::shared_ptr<Entry>> sessions_;
};

}  // namespace clarify
