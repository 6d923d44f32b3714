#include <cstdlib>
#include <exception>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "clarify/commands.hpp"
#include "clarify/types.hpp"

int main(int argc, char** argv) {
  using namespace clarify;

  CLI::App app{"Clarifying-question retrieval: evaluation, data synthesis and live service"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off");

  EvaluateArgs eval;
  std::string eval_selector, eval_mode;
  auto* evaluate = app.add_subcommand("evaluate", "Run seeded games against the simulated user");
  evaluate->add_option("--corpus", eval.corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--queries", eval.queries, "Queries JSONL (id, query, target_id)")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--out-dir", eval.out_dir, "Output directory")->required();
  evaluate->add_option("--config", eval.config, "Config JSON")->check(CLI::ExistingFile);
  evaluate->add_option("--selector", eval_selector, "eig|kl|random|external")
      ->check(CLI::IsMember({"eig", "kl", "random", "external"}));
  evaluate->add_option("--posterior", eval_mode, "language|explicit")->check(CLI::IsMember({"language", "explicit"}));
  evaluate->add_option("--turns", eval.turns, "Turns per game, initial query included")->check(CLI::PositiveNumber);
  evaluate->add_option("--corruption", eval.corruption, "Probability of a corrupted answer")->check(CLI::Range(0.0, 1.0));
  evaluate->add_option("--workers", eval.workers, "Parallel games")->check(CLI::PositiveNumber);
  evaluate->add_option("--seed", eval.seed, "Base seed");

  SynthesizeArgs synth;
  std::string synth_rule;
  auto* synthesize = app.add_subcommand("synthesize", "Generate rank-filtered training records");
  synthesize->add_option("--corpus", synth.corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  synthesize->add_option("--queries", synth.queries, "Queries JSONL")->required()->check(CLI::ExistingFile);
  synthesize->add_option("--out", synth.out, "Output JSONL")->required();
  synthesize->add_option("--config", synth.config, "Config JSON")->check(CLI::ExistingFile);
  synthesize->add_option("--rule", synth_rule, "delta|top10")->check(CLI::IsMember({"delta", "top10"}));
  synthesize->add_option("--games", synth.games, "Games per query")->check(CLI::PositiveNumber);
  synthesize->add_option("--turns", synth.turns, "Turns per game")->check(CLI::PositiveNumber);
  synthesize->add_option("--workers", synth.workers, "Parallel games")->check(CLI::PositiveNumber);
  synthesize->add_option("--seed", synth.seed, "Base seed");

  ServeArgs serve_args;
  auto* serve = app.add_subcommand("serve", "Run the HTTP session service");
  serve->add_option("--corpus", serve_args.corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  serve->add_option("--config", serve_args.config, "Config JSON")->check(CLI::ExistingFile);
  serve->add_option("--port", serve_args.port, "Port (overrides service.port)");
  serve->add_option("--host", serve_args.host, "Bind address");

  std::string world_dir;
  std::size_t world_queries = 300;
  std::uint64_t world_seed = 0;
  auto* world = app.add_subcommand("make-world", "Write the 128-item synthetic corpus and queries");
  world->add_option("--out-dir", world_dir, "Output directory")->required();
  world->add_option("--queries", world_queries, "Number of queries");
  world->add_option("--seed", world_seed, "Seed");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*evaluate) {
      if (!eval_selector.empty()) eval.selector = parse_selector_kind(eval_selector);
      if (!eval_mode.empty()) eval.mode = parse_posterior_mode(eval_mode);
      run_evaluate(eval);
    } else if (*synthesize) {
      if (!synth_rule.empty()) synth.rule = parse_keep_rule(synth_rule);
      run_synthesize(synth);
    } else if (*serve) {
      return run_serve(serve_args);
    } else if (*world) {
      run_make_world(world_dir, world_queries, world_seed);
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}
