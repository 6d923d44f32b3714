#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "clarify/types.hpp"

namespace clarify {

enum class KeepRule { top10, delta };
std::string_view to_string(KeepRule rule);
KeepRule parse_keep_rule(std::string_view text);

struct RetrieverConfig {
  std::string backend = "lexical";  // lexical | http
  int dim = 256;
  double temperature = 1.0;
  std::string endpoint;
  int batch_size = 64;
};

struct PosteriorConfig {
  PosteriorMode mode = PosteriorMode::language;
  double likelihood_floor = 1e-6;
  int answer_weight = 1;
};

struct SelectionConfig {
  SelectorKind kind = SelectorKind::eig;
  int top_k = 10;  // 0 scores every corpus item
  int pool_size = 20;
  bool kl_mean_cosine = false;
  std::string endpoint;  // external question generator
};

struct OracleConfig {
  std::string backend = "mock";  // mock | http-chat
  std::string endpoint;
  std::string model = "gpt-3.5-turbo-0613";
  double temperature = 0.8;
  int max_concurrency = 4;
  int timeout_ms = 60000;
  int retries = 3;
  int backoff_ms = 500;
  std::string prompt_dir = CLARIFY_DEFAULT_PROMPT_DIR;
  std::string mock_style = "binary";  // binary | open | mixed
};

struct GameConfig {
  int max_turns = 10;  // includes the initial query
  double corruption = 0.0;
  int workers = 1;
};

struct SynthesisConfig {
  int games_per_query = 5;
  KeepRule rule = KeepRule::delta;
  PosteriorMode mode = PosteriorMode::explicit_bayes;
};

struct ServiceConfig {
  int port = 8080;
  std::string data_dir;  // empty keeps sessions in memory only
  std::string webui_dir;
  SelectorKind selector = SelectorKind::eig;
  int pool_size = 10;
};

struct Config {
  RetrieverConfig retriever;
  PosteriorConfig posterior;
  SelectionConfig selection;
  OracleConfig oracles;
  GameConfig game;
  SynthesisConfig synthesis;
  ServiceConfig service;

  /// Throws ValidationError for out-of-range values.
  void validate() const;
};

/// Overlays a nested JSON object ({"retriever": {"dim": 128}, ...}) onto defaults.
/// Unknown sections or keys are rejected.
Config config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const Config& config);
Config load_config(const std::filesystem::path& path);

}  // namespace clarify
