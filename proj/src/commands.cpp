#include "clarify/commands.hpp"

#include <csignal>
#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "clarify/corpus.hpp"
#include "clarify/engine.hpp"
#include "clarify/error.hpp"
#include "clarify/harness.hpp"
#include "clarify/service.hpp"
#include "clarify/synthesis.hpp"
#include "clarify/synthetic.hpp"

namespace clarify {

namespace {

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
  out << content;
  if (!out) throw std::runtime_error(fmt::format("write to {} failed", path.string()));
}

}  // namespace

Config load_config_or_default(const std::optional<std::filesystem::path>& path) {
  Config config = path ? load_config(*path) : Config{};
  config.validate();
  return config;
}

void run_evaluate(const EvaluateArgs& args) {
  auto config = load_config_or_default(args.config);
  if (args.selector) config.selection.kind = *args.selector;
  if (args.mode) config.posterior.mode = *args.mode;
  if (args.turns) config.game.max_turns = *args.turns;
  if (args.corruption) config.game.corruption = *args.corruption;
  if (args.workers) config.game.workers = *args.workers;
  config.validate();

  const auto corpus = load_corpus(args.corpus);
  const auto queries = load_queries(args.queries);
  const Engine engine(corpus, config);

  GameOptions options;
  options.selector = config.selection.kind;
  options.mode = config.posterior.mode;
  options.max_turns = config.game.max_turns;
  options.pool_size = config.selection.pool_size;
  options.corruption = config.game.corruption;

  spdlog::info("evaluating {} queries: selector={} posterior={} turns={}", queries.size(),
               to_string(options.selector), to_string(options.mode), options.max_turns);
  const auto games = run_games(queries, engine, options, args.seed, config.game.workers);
  const auto metrics = report(games);
  if (metrics.failed > 0) spdlog::warn("{} of {} games failed", metrics.failed, games.size());

  std::filesystem::create_directories(args.out_dir);
  write_file(args.out_dir / "curves.csv", curves_csv(metrics));
  write_file(args.out_dir / "summary.csv", summary_csv(method_label(options.selector, options.mode), metrics));
  write_file(args.out_dir / "games.jsonl", games_jsonl(games));
  write_file(args.out_dir / "question_types.csv",
             question_types_csv(to_string(options.selector), question_type_buckets(games, *engine.oracles().labeler)));
  spdlog::info("final turn: mrr={:.4f} rate={:.4f} cumulative={:.4f}", metrics.mrr.back(), metrics.rate.back(),
               metrics.cumulative.back());
}

std::size_t run_synthesize(const SynthesizeArgs& args) {
  auto config = load_config_or_default(args.config);
  if (args.rule) config.synthesis.rule = *args.rule;
  if (args.games) config.synthesis.games_per_query = *args.games;
  if (args.turns) config.game.max_turns = *args.turns;
  if (args.workers) config.game.workers = *args.workers;
  config.validate();

  const auto corpus = load_corpus(args.corpus);
  const auto queries = load_queries(args.queries);
  const Engine engine(corpus, config);

  SynthesisOptions options;
  options.games_per_query = config.synthesis.games_per_query;
  options.max_turns = config.game.max_turns;
  options.pool_size = config.selection.pool_size;
  options.rule = config.synthesis.rule;
  options.mode = config.synthesis.mode;
  options.corruption = config.game.corruption;

  const auto records = synthesize(queries, engine, options, args.seed, config.game.workers);
  if (args.out.has_parent_path()) std::filesystem::create_directories(args.out.parent_path());
  export_records(records, args.out);
  spdlog::info("kept {} questions under rule {}", records.size(), to_string(options.rule));
  return records.size();
}

void run_make_world(const std::filesystem::path& out_dir, std::size_t num_queries, std::uint64_t seed) {
  const auto world = make_synthetic_world(num_queries, seed);
  std::filesystem::create_directories(out_dir);
  std::string corpus;
  for (const auto& item : world.corpus) corpus += item_to_json_line(item) + "\n";
  std::string queries;
  for (const auto& q : world.queries)
    queries += nlohmann::json{{"id", q.id}, {"query", q.query}, {"target_id", q.target_id}}.dump() + "\n";
  write_file(out_dir / "corpus.jsonl", corpus);
  write_file(out_dir / "queries.jsonl", queries);
}

namespace {

Service* g_service = nullptr;

extern "C" void handle_stop_signal(int) {
  if (g_service) g_service->stop();
}

}  // namespace

int run_serve(const ServeArgs& args) {
  auto config = load_config_or_default(args.config);
  if (args.port) config.service.port = *args.port;
  config.validate();

  const auto corpus = load_corpus(args.corpus);
  const Engine engine(corpus, config);
  SessionOptions options;
  options.max_turns = config.game.max_turns;
  options.pool_size = config.service.pool_size;
  options.selector = config.service.selector;
  options.data_dir = config.service.data_dir;
  SessionStore store(engine, options);
  Service service(store, config.service.webui_dir);
  if (!service.bind(args.host, config.service.port)) {
    spdlog::error("cannot bind {}:{}", args.host, config.service.port);
    return 1;
  }
  g_service = &service;
  std::signal(SIGINT, handle_stop_signal);
  std::signal(SIGTERM, handle_stop_signal);
  spdlog::info("serving {} items on {}:{}", corpus.size(), args.host, service.port());
  service.serve();
  g_service = nullptr;
  return 0;
}

}  // namespace clarify
