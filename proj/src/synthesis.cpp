#include "clarify/synthesis.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "clarify/error.hpp"
#include "clarify/parallel.hpp"
#include "clarify/text.hpp"

namespace clarify {

using nlohmann::json;

bool keep_question(std::size_t rank_before, std::size_t rank_after, KeepRule rule) {
  if (rank_before < 1 || rank_after < 1) throw ValidationError("ranks are 1-based");
  if (rank_after <= 10) return true;
  if (rule == KeepRule::top10) return false;
  return rank_before >= rank_after + 10;
}

json record_to_json(const TrainingRecord& r) {
  json turns = json::array();
  for (const auto& t : r.turns) turns.push_back({{"q", t.question}, {"a", t.answer}});
  return json{{"initial_query", r.initial_query},
              {"turns", std::move(turns)},
              {"contexts", r.contexts},
              {"target_question", r.target_question},
              {"meta",
               {{"game_seed", r.meta.game_seed},
                {"turn", r.meta.turn},
                {"rank_before", r.meta.rank_before},
                {"rank_after", r.meta.rank_after},
                {"rule", to_string(r.meta.rule)}}}};
}

TrainingRecord record_from_json(const json& j) {
  TrainingRecord r;
  r.initial_query = j.at("initial_query").get<std::string>();
  for (const auto& t : j.at("turns")) r.turns.push_back({t.at("q").get<std::string>(), t.at("a").get<std::string>()});
  r.contexts = j.at("contexts").get<std::vector<std::string>>();
  r.target_question = j.at("target_question").get<std::string>();
  const auto& m = j.at("meta");
  r.meta.game_seed = m.at("game_seed").get<std::uint64_t>();
  r.meta.turn = m.at("turn").get<int>();
  r.meta.rank_before = m.at("rank_before").get<std::size_t>();
  r.meta.rank_after = m.at("rank_after").get<std::size_t>();
  r.meta.rule = parse_keep_rule(m.at("rule").get<std::string>());
  if (r.target_question.empty()) throw ParseError("empty target_question");
  if (r.contexts.size() > 3) throw ParseError("more than 3 contexts");
  return r;
}

std::uint64_t synthesis_game_seed(std::uint64_t seed, std::size_t query_index, int game_index) {
  return derive_seed(seed, query_index, static_cast<std::uint64_t>(game_index));
}

GameOptions synthesis_game_options(const SynthesisOptions& options) {
  GameOptions g;
  g.selector = SelectorKind::random;
  g.mode = options.mode;
  g.max_turns = options.max_turns;
  g.pool_size = options.pool_size;
  g.corruption = options.corruption;
  return g;
}

std::vector<TrainingRecord> records_from_game(const GameRecord& game, const Corpus& corpus, KeepRule rule) {
  std::vector<TrainingRecord> out;
  if (game.failed) return out;
  for (std::size_t i = 1; i < game.turns.size(); ++i) {
    const auto& t = game.turns[i];
    if (!keep_question(t.rank_before, t.rank_after, rule)) continue;
    TrainingRecord r;
    r.initial_query = game.initial_query;
    for (std::size_t k = 1; k < i; ++k) r.turns.push_back({game.turns[k].question, game.turns[k].answer});
    double mass = 0.0;
    const auto& shown = game.turns[i - 1].belief_top3;
    for (std::size_t k = 0; k < shown.size() && k < 3; ++k) {
      r.contexts.push_back(render_candidate_context(corpus[corpus.position_of(shown[k].first)], k + 1, shown[k].second));
      mass += shown[k].second;
      if (mass >= 0.5) break;
    }
    r.target_question = t.question;
    r.meta = {game.seed, t.turn, t.rank_before, t.rank_after, rule};
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<TrainingRecord> synthesize(std::span<const QuerySpec> queries, const Engine& engine,
                                       const SynthesisOptions& options, std::uint64_t seed, int workers) {
  if (options.games_per_query < 1) throw ValidationError("games_per_query must be positive");
  const auto per_query = static_cast<std::size_t>(options.games_per_query);
  const auto game_options = synthesis_game_options(options);
  std::vector<GameRecord> games(queries.size() * per_query);
  parallel_for(games.size(), workers, [&](std::size_t i) {
    const auto q = i / per_query;
    const auto g = static_cast<int>(i % per_query);
    games[i] = run_game(queries[q], engine, game_options, synthesis_game_seed(seed, q, g));
  });

  std::vector<TrainingRecord> records;
  std::size_t dropped = 0;
  for (const auto& game : games) {
    if (game.failed) {
      ++dropped;
      continue;
    }
    auto kept = records_from_game(game, engine.corpus(), options.rule);
    records.insert(records.end(), std::make_move_iterator(kept.begin()), std::make_move_iterator(kept.end()));
  }
  if (dropped > 0) spdlog::warn("{} of {} synthesis games failed and were dropped", dropped, games.size());
  return records;
}

std::string records_jsonl(std::span<const TrainingRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

std::vector<TrainingRecord> parse_records(std::string_view jsonl) {
  std::vector<TrainingRecord> out;
  const auto lines = text::split_lines(jsonl);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (text::trim(lines[n]).empty()) continue;
    try {
      out.push_back(record_from_json(json::parse(lines[n])));
    } catch (const std::exception& e) {
      throw ParseError(fmt::format("records line {}: {}", n + 1, e.what()));
    }
  }
  return out;
}

void export_records(std::span<const TrainingRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
  out << records_jsonl(records);
  if (!out) throw std::runtime_error(fmt::format("write to {} failed", path.string()));
}

std::vector<TrainingRecord> load_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot open records file {}", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_records(buffer.str());
}

}  // namespace clarify
