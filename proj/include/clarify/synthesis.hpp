#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "clarify/config.hpp"
#include "clarify/engine.hpp"
#include "clarify/harness.hpp"

namespace clarify {

/// top10: rank_after <= 10. delta: rank_after <= 10 or rank_before - rank_after >= 10.
bool keep_question(std::size_t rank_before, std::size_t rank_after, KeepRule rule);

struct RecordMeta {
  std::uint64_t game_seed = 0;
  int turn = 0;
  std::size_t rank_before = 0;
  std::size_t rank_after = 0;
  KeepRule rule = KeepRule::delta;

  bool operator==(const RecordMeta&) const = default;
};

struct TrainingRecord {
  std::string initial_query;
  std::vector<Turn> turns;  // history before the kept question
  std::vector<std::string> contexts;
  std::string target_question;
  RecordMeta meta;

  bool operator==(const TrainingRecord&) const = default;
};

nlohmann::json record_to_json(const TrainingRecord& record);
TrainingRecord record_from_json(const nlohmann::json& j);

struct SynthesisOptions {
  int games_per_query = 5;
  int max_turns = 10;
  int pool_size = 20;
  KeepRule rule = KeepRule::delta;
  PosteriorMode mode = PosteriorMode::explicit_bayes;
  double corruption = 0.0;
};

/// Seed of game g for query q.
std::uint64_t synthesis_game_seed(std::uint64_t seed, std::size_t query_index, int game_index);

/// The game options a synthesis run uses: random selector, configured mode.
GameOptions synthesis_game_options(const SynthesisOptions& options);

/// Records for every kept question of one finished game. Contexts are the
/// candidate blocks the generator saw before the question was asked.
std::vector<TrainingRecord> records_from_game(const GameRecord& game, const Corpus& corpus, KeepRule rule);

/// Runs games_per_query games per query; failed games are logged and dropped.
std::vector<TrainingRecord> synthesize(std::span<const QuerySpec> queries, const Engine& engine,
                                       const SynthesisOptions& options, std::uint64_t seed, int workers = 1);

std::string records_jsonl(std::span<const TrainingRecord> records);
std::vector<TrainingRecord> parse_records(std::string_view jsonl);
void export_records(std::span<const TrainingRecord> records, const std::filesystem::path& path);
std::vector<TrainingRecord> load_records(const std::filesystem::path& path);

}  // namespace clarify
