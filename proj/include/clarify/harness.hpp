#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "clarify/engine.hpp"
#include "clarify/rng.hpp"
#include "clarify/types.hpp"

namespace clarify {

/// An initial user query paired with the item the user is looking for.
struct QuerySpec {
  std::string id;
  std::string query;
  std::string target_id;

  bool operator==(const QuerySpec&) const = default;
};

/// JSON Lines with keys id, query, target_id.
std::vector<QuerySpec> parse_queries(std::string_view jsonl);
std::vector<QuerySpec> load_queries(const std::filesystem::path& path);

struct TurnLog {
  int turn = 1;  // 1 = initial query, no question asked
  std::string question;
  std::string answer;
  std::size_t rank_before = 0;
  std::size_t rank_after = 0;
  std::vector<std::pair<std::string, double>> belief_top3;

  bool operator==(const TurnLog&) const = default;
};

struct GameRecord {
  std::string query_id;
  std::string initial_query;
  std::string target_id;
  SelectorKind selector = SelectorKind::random;
  PosteriorMode mode = PosteriorMode::language;
  std::uint64_t seed = 0;
  std::vector<TurnLog> turns;
  bool failed = false;
  std::string failure;

  bool operator==(const GameRecord&) const = default;
};

nlohmann::json game_to_json(const GameRecord& game);
GameRecord game_from_json(const nlohmann::json& j);

/// Answers as the user looking for `target`. With probability `corruption` the
/// answer is replaced by the one a different item would give (an item whose
/// answer differs, found by sampling); if no such item turns up the truthful
/// answer stands.
class UserSimulator {
 public:
  UserSimulator(const Answerer& answerer, const Corpus& corpus, double corruption, std::uint64_t seed);
  std::string answer(std::string_view question, const Item& target);

 private:
  const Answerer* answerer_;
  const Corpus* corpus_;
  double corruption_;
  Rng rng_;
};

struct GameOptions {
  SelectorKind selector = SelectorKind::random;
  PosteriorMode mode = PosteriorMode::language;
  int max_turns = 10;
  int pool_size = 20;
  double corruption = 0.0;
};

/// One simulated search. Turn 1 retrieves on the initial query; each later turn
/// generates a pool, selects, simulates the answer and updates the belief.
/// Oracle failures end the game with `failed` set.
GameRecord run_game(const QuerySpec& query, const Engine& engine, const GameOptions& options, std::uint64_t seed);

/// Game i gets seed derive_seed(seed, i). Runs on `workers` threads; output order
/// follows `queries`.
std::vector<GameRecord> run_games(std::span<const QuerySpec> queries, const Engine& engine,
                                  const GameOptions& options, std::uint64_t seed, int workers = 1);

// Metrics --------------------------------------------------------------------

/// Mean of 1/rank. Throws ValidationError on empty input or rank 0.
double mrr(std::span<const std::size_t> ranks);

struct RetrievalRates {
  double rate = 0.0;        // target ranked first at exactly `turn`
  double cumulative = 0.0;  // target ranked first at some turn <= `turn`
};

/// Over successful games; `turn` is 1-based. Throws ValidationError when a game is shorter.
RetrievalRates retrieval_rates(std::span<const GameRecord> games, int turn);

struct MetricsReport {
  std::vector<double> mrr;
  std::vector<double> rate;
  std::vector<double> cumulative;
  std::vector<double> mrr_sem;
  std::vector<double> rate_sem;
  std::vector<double> cumulative_sem;
  double delta_cumulative = 0.0;  // cumulative(T) - cumulative(1)
  std::size_t games = 0;
  std::size_t failed = 0;

  int turns() const noexcept { return static_cast<int>(mrr.size()); }
};

/// Per-turn curves over the successful games. Throws ValidationError if none succeeded.
MetricsReport report(std::span<const GameRecord> games);

/// "Random (explicit posterior)", "EIG (language posterior)", ...
std::string method_label(SelectorKind selector, PosteriorMode mode);

std::string curves_csv(const MetricsReport& report);
std::string summary_header();
std::string summary_row(std::string_view label, const MetricsReport& report);
/// Header plus one final-turn row, in the results-table layout.
std::string summary_csv(std::string_view label, const MetricsReport& report);

/// Question-type counts per block of 100 asked questions.
struct QuestionTypeBucket {
  std::size_t bucket = 0;
  std::size_t counts[5] = {0, 0, 0, 0, 0};  // indexed by QuestionType
};
std::vector<QuestionTypeBucket> question_type_buckets(std::span<const GameRecord> games,
                                                      const QuestionLabeler& labeler);
std::string question_types_csv(std::string_view selector, const std::vector<QuestionTypeBucket>& buckets);

std::string games_jsonl(std::span<const GameRecord> games);

}  // namespace clarify
