#include "clarify/harness.hpp"

#include <cmath>
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

std::vector<QuerySpec> parse_queries(std::string_view jsonl) {
  std::vector<QuerySpec> out;
  const auto lines = text::split_lines(jsonl);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (text::trim(lines[n]).empty()) continue;
    try {
      const auto j = json::parse(lines[n]);
      QuerySpec q{j.at("id").get<std::string>(), j.at("query").get<std::string>(),
                  j.at("target_id").get<std::string>()};
      if (text::trim(q.query).empty()) throw ParseError("empty query");
      out.push_back(std::move(q));
    } catch (const std::exception& e) {
      throw ParseError(fmt::format("queries line {}: {}", n + 1, e.what()));
    }
  }
  return out;
}

std::vector<QuerySpec> load_queries(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot open queries file {}", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_queries(buffer.str());
}

json game_to_json(const GameRecord& game) {
  json turns = json::array();
  for (const auto& t : game.turns) {
    json top = json::array();
    for (const auto& [id, p] : t.belief_top3) top.push_back({{"id", id}, {"prob", p}});
    turns.push_back({{"turn", t.turn},
                     {"question", t.question},
                     {"answer", t.answer},
                     {"rank_before", t.rank_before},
                     {"rank_after", t.rank_after},
                     {"belief_top3", std::move(top)}});
  }
  return json{{"query_id", game.query_id},
              {"initial_query", game.initial_query},
              {"target_id", game.target_id},
              {"selector", to_string(game.selector)},
              {"posterior", to_string(game.mode)},
              {"seed", game.seed},
              {"failed", game.failed},
              {"failure", game.failure},
              {"turns", std::move(turns)}};
}

GameRecord game_from_json(const json& j) {
  GameRecord g;
  g.query_id = j.at("query_id").get<std::string>();
  g.initial_query = j.at("initial_query").get<std::string>();
  g.target_id = j.at("target_id").get<std::string>();
  g.selector = parse_selector_kind(j.at("selector").get<std::string>());
  g.mode = parse_posterior_mode(j.at("posterior").get<std::string>());
  g.seed = j.at("seed").get<std::uint64_t>();
  g.failed = j.at("failed").get<bool>();
  g.failure = j.at("failure").get<std::string>();
  for (const auto& t : j.at("turns")) {
    TurnLog log;
    log.turn = t.at("turn").get<int>();
    log.question = t.at("question").get<std::string>();
    log.answer = t.at("answer").get<std::string>();
    log.rank_before = t.at("rank_before").get<std::size_t>();
    log.rank_after = t.at("rank_after").get<std::size_t>();
    for (const auto& e : t.at("belief_top3"))
      log.belief_top3.emplace_back(e.at("id").get<std::string>(), e.at("prob").get<double>());
    g.turns.push_back(std::move(log));
  }
  return g;
}

// Simulated user ---------------------------------------------------------------

UserSimulator::UserSimulator(const Answerer& answerer, const Corpus& corpus, double corruption, std::uint64_t seed)
    : answerer_(&answerer), corpus_(&corpus), corruption_(corruption), rng_(seed) {}

std::string UserSimulator::answer(std::string_view question, const Item& target) {
  auto truthful = answerer_->answer(question, target);
  if (corruption_ <= 0 || rng_.uniform() >= corruption_) return truthful;
  constexpr int kDecoyDraws = 64;
  for (int draw = 0; draw < kDecoyDraws; ++draw) {
    const auto& decoy = (*corpus_)[static_cast<std::size_t>(rng_.index(corpus_->size()))];
    if (decoy.id == target.id) continue;
    auto wrong = answerer_->answer(question, decoy);
    if (wrong != truthful) return wrong;
  }
  return truthful;
}

// Games ----------------------------------------------------------------------

namespace {

std::vector<std::pair<std::string, double>> top3(const BeliefDistribution& belief, const Corpus& corpus) {
  std::vector<std::pair<std::string, double>> out;
  const auto order = belief.ranking();
  for (std::size_t i = 0; i < order.size() && i < 3; ++i) out.emplace_back(corpus[order[i]].id, belief[order[i]]);
  return out;
}

}  // namespace

GameRecord run_game(const QuerySpec& query, const Engine& engine, const GameOptions& options, std::uint64_t seed) {
  const auto& corpus = engine.corpus();
  const auto target_pos = corpus.position_of(query.target_id);
  const auto& target = corpus[target_pos];

  GameRecord game;
  game.query_id = query.id;
  game.initial_query = query.query;
  game.target_id = query.target_id;
  game.selector = options.selector;
  game.mode = options.mode;
  game.seed = seed;

  UserSimulator user(*engine.oracles().answerer, corpus, options.corruption, derive_seed(seed, 2));
  InteractionHistory history{query.query, {}};
  try {
    auto belief = engine.retriever().retrieve(query.query);
    auto rank = belief.rank_of_position(target_pos);
    game.turns.push_back({1, "", "", rank, rank, top3(belief, corpus)});

    for (int turn = 2; turn <= options.max_turns; ++turn) {
      const auto blocks = render_contexts(top_candidates(belief, corpus));
      CandidatePool pool;
      if (options.selector != SelectorKind::external)
        pool = engine.oracles().generator->generate_pool(history, blocks, options.pool_size);
      const auto selection = select_question(options.selector, pool, belief, engine.selection_context(history, blocks),
                                             derive_seed(seed, 1, static_cast<std::uint64_t>(turn)));
      auto answer = user.answer(selection.question, target);
      history.turns.push_back({selection.question, answer});
      const AnswerLikelihoodTable* table = selection.tables.empty() ? nullptr : &selection.tables[selection.index];
      belief = update_belief(options.mode, belief, history, engine.belief_deps(), table);
      const auto next_rank = belief.rank_of_position(target_pos);
      game.turns.push_back({turn, selection.question, std::move(answer), rank, next_rank, top3(belief, corpus)});
      rank = next_rank;
    }
  } catch (const OracleError& e) {
    game.failed = true;
    game.failure = e.what();
  } catch (const TransportError& e) {
    game.failed = true;
    game.failure = e.what();
  }
  if (game.failed) spdlog::warn("game for query '{}' failed: {}", query.id, game.failure);
  return game;
}

std::vector<GameRecord> run_games(std::span<const QuerySpec> queries, const Engine& engine,
                                  const GameOptions& options, std::uint64_t seed, int workers) {
  std::vector<GameRecord> games(queries.size());
  parallel_for(queries.size(), workers, [&](std::size_t i) {
    games[i] = run_game(queries[i], engine, options, derive_seed(seed, static_cast<std::uint64_t>(i)));
  });
  return games;
}

// Metrics --------------------------------------------------------------------

double mrr(std::span<const std::size_t> ranks) {
  if (ranks.empty()) throw ValidationError("mrr of an empty rank list");
  double total = 0.0;
  for (auto r : ranks) {
    if (r == 0) throw ValidationError("ranks are 1-based");
    total += 1.0 / static_cast<double>(r);
  }
  return total / static_cast<double>(ranks.size());
}

RetrievalRates retrieval_rates(std::span<const GameRecord> games, int turn) {
  if (turn < 1) throw ValidationError("turns are 1-based");
  std::size_t n = 0;
  std::size_t hits = 0;
  std::size_t cumulative = 0;
  for (const auto& g : games) {
    if (g.failed) continue;
    if (g.turns.size() < static_cast<std::size_t>(turn))
      throw ValidationError(fmt::format("game '{}' has {} turns, asked for turn {}", g.query_id, g.turns.size(), turn));
    ++n;
    if (g.turns[static_cast<std::size_t>(turn - 1)].rank_after == 1) ++hits;
    for (int t = 0; t < turn; ++t) {
      if (g.turns[static_cast<std::size_t>(t)].rank_after == 1) {
        ++cumulative;
        break;
      }
    }
  }
  if (n == 0) return {};
  return {static_cast<double>(hits) / static_cast<double>(n), static_cast<double>(cumulative) / static_cast<double>(n)};
}

namespace {

double sem(const std::vector<double>& values) {
  const auto n = static_cast<double>(values.size());
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

}  // namespace

MetricsReport report(std::span<const GameRecord> games) {
  MetricsReport out;
  std::vector<const GameRecord*> ok;
  for (const auto& g : games) {
    if (g.failed) {
      ++out.failed;
    } else {
      ok.push_back(&g);
    }
  }
  if (ok.empty()) throw ValidationError("no successful games to report on");
  out.games = ok.size();
  std::size_t turns = ok.front()->turns.size();
  for (const auto* g : ok) turns = std::min(turns, g->turns.size());

  std::vector<char> seen_top(ok.size(), 0);
  for (std::size_t t = 0; t < turns; ++t) {
    std::vector<double> reciprocal, hit, cumulative;
    for (std::size_t i = 0; i < ok.size(); ++i) {
      const auto rank = ok[i]->turns[t].rank_after;
      if (rank == 1) seen_top[i] = 1;
      reciprocal.push_back(1.0 / static_cast<double>(rank));
      hit.push_back(rank == 1 ? 1.0 : 0.0);
      cumulative.push_back(seen_top[i] ? 1.0 : 0.0);
    }
    auto mean = [](const std::vector<double>& v) {
      double s = 0.0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    };
    out.mrr.push_back(mean(reciprocal));
    out.rate.push_back(mean(hit));
    out.cumulative.push_back(mean(cumulative));
    out.mrr_sem.push_back(sem(reciprocal));
    out.rate_sem.push_back(sem(hit));
    out.cumulative_sem.push_back(sem(cumulative));
  }
  out.delta_cumulative = out.cumulative.back() - out.cumulative.front();
  return out;
}

std::string method_label(SelectorKind selector, PosteriorMode mode) {
  std::string name;
  switch (selector) {
    case SelectorKind::random: name = "Random"; break;
    case SelectorKind::eig: name = "EIG"; break;
    case SelectorKind::kl: name = "KL"; break;
    case SelectorKind::external: name = "External"; break;
  }
  return fmt::format("{} ({} posterior)", name, to_string(mode));
}

std::string curves_csv(const MetricsReport& r) {
  std::string out = "turn,mrr,rate,cumulative,mrr_sem,rate_sem,cumulative_sem\n";
  for (int t = 0; t < r.turns(); ++t) {
    const auto i = static_cast<std::size_t>(t);
    out += fmt::format("{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", t + 1, r.mrr[i], r.rate[i], r.cumulative[i],
                       r.mrr_sem[i], r.rate_sem[i], r.cumulative_sem[i]);
  }
  return out;
}

std::string summary_header() {
  return "Methods,MRR,Retrieval Rate,Cumulat. Retrieval Rate,Delta Cumulat. Retrieval Rate";
}

std::string summary_row(std::string_view label, const MetricsReport& r) {
  std::string name(label);
  if (name.find_first_of(",\"") != std::string::npos) name = "\"" + text::replace_all_icase(name, "\"", "\"\"") + "\"";
  return fmt::format("{},{:.4f},{:.4f},{:.4f},{:.4f}", name, r.mrr.back(), r.rate.back(), r.cumulative.back(),
                     r.delta_cumulative);
}

std::string summary_csv(std::string_view label, const MetricsReport& r) {
  return summary_header() + "\n" + summary_row(label, r) + "\n";
}

std::vector<QuestionTypeBucket> question_type_buckets(std::span<const GameRecord> games,
                                                      const QuestionLabeler& labeler) {
  std::vector<QuestionTypeBucket> buckets;
  std::size_t asked = 0;
  for (const auto& g : games) {
    for (const auto& t : g.turns) {
      if (t.question.empty()) continue;
      const auto b = asked++ / 100;
      if (buckets.size() <= b) buckets.push_back(QuestionTypeBucket{b, {0, 0, 0, 0, 0}});
      ++buckets[b].counts[static_cast<int>(labeler.label(t.question))];
    }
  }
  return buckets;
}

std::string question_types_csv(std::string_view selector, const std::vector<QuestionTypeBucket>& buckets) {
  std::string out = "selector,bucket,describe,binary,character,event,other\n";
  for (const auto& b : buckets) {
    out += fmt::format("{},{},{},{},{},{},{}\n", selector, b.bucket, b.counts[0], b.counts[1], b.counts[2],
                       b.counts[3], b.counts[4]);
  }
  return out;
}

std::string games_jsonl(std::span<const GameRecord> games) {
  std::string out;
  for (const auto& g : games) {
    out += game_to_json(g).dump();
    out += '\n';
  }
  return out;
}

}  // namespace clarify
