#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "clarify/error.hpp"
#include "clarify/harness.hpp"
#include "support.hpp"

using namespace clarify;
using namespace clarify::testing;

namespace {

GameRecord ranks_game(std::vector<std::size_t> ranks) {
  GameRecord g;
  g.query_id = "g";
  int t = 1;
  std::size_t before = ranks.front();
  for (auto r : ranks) {
    g.turns.push_back({t++, t > 2 ? "q?" : "", "", before, r, {}});
    before = r;
  }
  return g;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

GameOptions options(SelectorKind s, PosteriorMode m, double corruption = 0.0) {
  GameOptions o;
  o.selector = s;
  o.mode = m;
  o.corruption = corruption;
  return o;
}

}  // namespace

TEST(Metrics, Mrr) {
  const std::vector<std::size_t> ones{1, 1, 1}, mixed{1, 4, 10}, two{2};
  EXPECT_DOUBLE_EQ(mrr(ones), 1.0);
  EXPECT_NEAR(mrr(mixed), 0.45, 1e-15);
  EXPECT_DOUBLE_EQ(mrr(two), 0.5);
  EXPECT_THROW(mrr(std::vector<std::size_t>{}), ValidationError);
  EXPECT_THROW(mrr(std::vector<std::size_t>{0}), ValidationError);
}

TEST(Metrics, RetrievalRates) {
  const std::vector<GameRecord> games{ranks_game({3, 1, 2}), ranks_game({5, 4, 4})};
  const auto t2 = retrieval_rates(games, 2);
  EXPECT_DOUBLE_EQ(t2.rate, 0.5);
  EXPECT_DOUBLE_EQ(t2.cumulative, 0.5);
  const auto t3 = retrieval_rates(games, 3);
  EXPECT_DOUBLE_EQ(t3.rate, 0.0);
  EXPECT_DOUBLE_EQ(t3.cumulative, 0.5);
  EXPECT_THROW(retrieval_rates(games, 4), ValidationError);
}

TEST(Metrics, ReportAllFirst) {
  const std::vector<GameRecord> games{ranks_game({1, 1, 1})};
  const auto r = report(games);
  for (int t = 0; t < 3; ++t) {
    EXPECT_DOUBLE_EQ(r.mrr[static_cast<std::size_t>(t)], 1.0);
    EXPECT_DOUBLE_EQ(r.rate[static_cast<std::size_t>(t)], 1.0);
    EXPECT_DOUBLE_EQ(r.cumulative[static_cast<std::size_t>(t)], 1.0);
  }
  EXPECT_DOUBLE_EQ(r.delta_cumulative, 0.0);
}

TEST(Metrics, ReportExcludesFailedAndChecksInvariants) {
  auto failed = ranks_game({1, 1, 1});
  failed.failed = true;
  const std::vector<GameRecord> games{ranks_game({3, 1, 2}), ranks_game({5, 4, 4}), failed};
  const auto r = report(games);
  EXPECT_EQ(r.games, 2u);
  EXPECT_EQ(r.failed, 1u);
  EXPECT_DOUBLE_EQ(r.delta_cumulative, r.cumulative.back() - r.cumulative.front());
  for (int t = 0; t < r.turns(); ++t) {
    const auto i = static_cast<std::size_t>(t);
    EXPECT_GE(r.cumulative[i], r.rate[i]);
    EXPECT_GE(r.mrr[i], r.rate[i]);
    if (t > 0) EXPECT_GE(r.cumulative[i], r.cumulative[i - 1]);
  }
  EXPECT_NEAR(r.mrr[0], (1.0 / 3 + 1.0 / 5) / 2, 1e-15);
  EXPECT_NEAR(r.rate_sem[1], std::sqrt(0.5) / std::sqrt(2.0), 1e-15);
  const std::vector<GameRecord> only_failed{failed};
  EXPECT_THROW(report(only_failed), ValidationError);
}

TEST(Metrics, SummaryMatchesGoldenLayout) {
  MetricsReport r;
  r.mrr = {0.2, 0.3694};
  r.rate = {0.1, 0.2739};
  r.cumulative = {0.3054, 0.5838};
  r.mrr_sem = r.rate_sem = r.cumulative_sem = {0.0, 0.0};
  r.delta_cumulative = 0.2784;
  const auto golden = read_file(CLARIFY_TEST_DATA_DIR "/summary_random_explicit.csv");
  EXPECT_EQ(summary_csv(method_label(SelectorKind::random, PosteriorMode::explicit_bayes), r), golden);
  EXPECT_EQ(curves_csv(r).substr(0, curves_csv(r).find('\n')),
            "turn,mrr,rate,cumulative,mrr_sem,rate_sem,cumulative_sem");
}

TEST(Games, JsonRoundTrip) {
  World w(3);
  const auto g = run_game(w.world.queries[0], *w.engine, options(SelectorKind::eig, PosteriorMode::language), 4);
  EXPECT_EQ(game_from_json(game_to_json(g)), g);
  const auto line = games_jsonl(std::vector<GameRecord>{g});
  EXPECT_EQ(game_from_json(nlohmann::json::parse(line)), g);
}

TEST(Games, ShapeAndDeterminism) {
  World w(3);
  const auto& q = w.world.queries[1];
  const auto a = run_game(q, *w.engine, options(SelectorKind::random, PosteriorMode::explicit_bayes), 9);
  const auto b = run_game(q, *w.engine, options(SelectorKind::random, PosteriorMode::explicit_bayes), 9);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.turns.size(), 10u);
  EXPECT_TRUE(a.turns[0].question.empty());
  for (std::size_t t = 1; t < a.turns.size(); ++t) {
    EXPECT_EQ(a.turns[t].turn, static_cast<int>(t + 1));
    EXPECT_EQ(a.turns[t].rank_before, a.turns[t - 1].rank_after);
    EXPECT_FALSE(a.turns[t].question.empty());
    EXPECT_GE(a.turns[t].rank_after, 1u);
  }
}

TEST(Games, TurnOneIndependentOfSelector) {
  World w(3);
  const auto& q = w.world.queries[2];
  const auto r = run_game(q, *w.engine, options(SelectorKind::random, PosteriorMode::language), 1);
  const auto e = run_game(q, *w.engine, options(SelectorKind::eig, PosteriorMode::language), 1);
  EXPECT_EQ(r.turns[0], e.turns[0]);
}

TEST(Games, RankConsistentWithLoggedBelief) {
  World w(3);
  const auto g = run_game(w.world.queries[0], *w.engine, options(SelectorKind::eig, PosteriorMode::explicit_bayes), 2);
  for (const auto& t : g.turns) {
    if (t.rank_after == 1) EXPECT_EQ(t.belief_top3.front().first, g.target_id);
    for (std::size_t i = 1; i < t.belief_top3.size(); ++i)
      EXPECT_GE(t.belief_top3[i - 1].second, t.belief_top3[i].second);
  }
}

TEST(Games, EigBinarySearchReachesTopWithinBound) {
  // Query mentions no attribute: the belief starts uniform over 128 items.
  World w(1);
  const std::size_t bound = static_cast<std::size_t>(std::ceil(std::log2(128.0))) + 1;
  for (const auto* id : {"syn-000", "syn-077", "syn-127"}) {
    const QuerySpec q{"q", "I remember a story.", id};
    for (auto mode : {PosteriorMode::explicit_bayes, PosteriorMode::language}) {
      const auto g = run_game(q, *w.engine, options(SelectorKind::eig, mode), 3);
      ASSERT_FALSE(g.failed);
      std::size_t first_top = 0;
      for (const auto& t : g.turns) {
        if (t.rank_after == 1) {
          first_top = static_cast<std::size_t>(t.turn);
          break;
        }
      }
      EXPECT_GE(first_top, 1u) << id;
      EXPECT_LE(first_top, bound) << id;
    }
  }
}

TEST(Games, OracleFailureMarksGameFailed) {
  struct Broken final : QuestionGenerator {
    CandidatePool generate_pool(const InteractionHistory&, const std::vector<std::string>&, int) const override {
      throw OracleError("backend down");
    }
  };
  const auto world = make_synthetic_world(2, 1);
  auto oracles = make_oracles(world_config().oracles);
  oracles.generator = std::make_shared<Broken>();
  const Engine engine(world.corpus, world_config(), oracles);
  const auto g = run_game(world.queries[0], engine, options(SelectorKind::eig, PosteriorMode::language), 1);
  EXPECT_TRUE(g.failed);
  EXPECT_EQ(g.turns.size(), 1u);
  EXPECT_NE(g.failure.find("backend down"), std::string::npos);
}

TEST(Games, ParallelMatchesSerial) {
  World w(12);
  const auto o = options(SelectorKind::kl, PosteriorMode::language, 0.2);
  EXPECT_EQ(run_games(w.world.queries, *w.engine, o, 5, 1), run_games(w.world.queries, *w.engine, o, 5, 3));
}

TEST(Simulator, CorruptionChangesAnswersAtTheConfiguredRate) {
  const auto world = make_synthetic_world(1, 1);
  const MockAnswerer answerer;
  UserSimulator honest(answerer, world.corpus, 0.0, 1);
  UserSimulator noisy(answerer, world.corpus, 0.2, 1);
  const auto& target = world.corpus[5];
  const auto era = synthetic_attributes()[1].values[static_cast<std::size_t>(synthetic_value(5, 1))];
  int wrong = 0;
  for (int i = 0; i < 5000; ++i) {
    EXPECT_EQ(honest.answer("What is the era of the book?", target), era);
    if (noisy.answer("What is the era of the book?", target) != era) ++wrong;
  }
  EXPECT_NEAR(wrong / 5000.0, 0.2, 0.02);
  UserSimulator stuck(answerer, world.corpus, 1.0, 1);
  EXPECT_EQ(stuck.answer("Who is the author of the book?", target), "Unknown");
}

TEST(Queries, ParseAndErrors) {
  const auto q = parse_queries(R"({"id":"a","query":"x y","target_id":"b1"})"
                               "\n\n");
  ASSERT_EQ(q.size(), 1u);
  EXPECT_EQ(q[0].target_id, "b1");
  EXPECT_THROW(parse_queries(R"({"id":"a","query":"","target_id":"b1"})"), ParseError);
  EXPECT_THROW(parse_queries("{"), ParseError);
}

TEST(QuestionTypes, BucketsOfHundred) {
  std::vector<GameRecord> games;
  for (int g = 0; g < 25; ++g) {
    GameRecord r;
    r.turns.push_back({1, "", "", 1, 1, {}});
    for (int t = 2; t <= 10; ++t) r.turns.push_back({t, t % 2 ? "Is it red?" : "Describe it?", "", 1, 1, {}});
    games.push_back(r);
  }
  const auto buckets = question_type_buckets(games, MockLabeler{});
  ASSERT_EQ(buckets.size(), 3u);
  std::size_t total = 0;
  for (const auto& b : buckets)
    for (auto c : b.counts) total += c;
  EXPECT_EQ(total, 225u);
  EXPECT_EQ(buckets[0].counts[0] + buckets[0].counts[1], 100u);
  const auto csv = question_types_csv("eig", buckets);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "selector,bucket,describe,binary,character,event,other");
}
