#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "clarify/config.hpp"

namespace clarify {

struct EvaluateArgs {
  std::filesystem::path corpus;
  std::filesystem::path queries;
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> config;
  std::optional<SelectorKind> selector;
  std::optional<PosteriorMode> mode;
  std::optional<int> turns;
  std::optional<double> corruption;
  std::optional<int> workers;
  std::uint64_t seed = 0;
};

/// Writes curves.csv, summary.csv, games.jsonl and question_types.csv into out_dir.
void run_evaluate(const EvaluateArgs& args);

struct SynthesizeArgs {
  std::filesystem::path corpus;
  std::filesystem::path queries;
  std::filesystem::path out;
  std::optional<std::filesystem::path> config;
  std::optional<KeepRule> rule;
  std::optional<int> games;
  std::optional<int> turns;
  std::optional<int> workers;
  std::uint64_t seed = 0;
};

/// Writes the kept TrainingRecords as JSON Lines to `out`. Returns the record count.
std::size_t run_synthesize(const SynthesizeArgs& args);

/// Writes corpus.jsonl and queries.jsonl of the synthetic world into out_dir.
void run_make_world(const std::filesystem::path& out_dir, std::size_t num_queries, std::uint64_t seed);

struct ServeArgs {
  std::filesystem::path corpus;
  std::optional<std::filesystem::path> config;
  std::optional<int> port;
  std::string host = "0.0.0.0";
};

/// Blocks until SIGINT/SIGTERM.
int run_serve(const ServeArgs& args);

Config load_config_or_default(const std::optional<std::filesystem::path>& path);

}  // namespace clarify
