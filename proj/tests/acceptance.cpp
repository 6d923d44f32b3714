// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "clarify/belief.hpp"
#include "clarify/commands.hpp"
#include "clarify/error.hpp"
#include "clarify/harness.hpp"
#include "clarify/selection.hpp"
#include "clarify/service.hpp"
#include "clarify/synthesis.hpp"
#include "support.hpp"

// after Eigen: resolv.h defines _res
#include <httplib.h>

using namespace clarify;
using namespace clarify::testing;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<Instance> instances() {
  std::mt19937_64 rng(1000);
  std::vector<Instance> out;
  for (int i = 0; i < 1000; ++i) out.push_back(random_instance(rng));
  return out;
}

Outcome eig_oracle() {
  const auto start = Clock::now();
  double worst = 0.0;
  for (const auto& inst : instances()) {
    const double got = expected_information_gain(to_matrix(inst.likelihood), to_vector(inst.prior));
    worst = std::max(worst, std::abs(got - brute_eig(inst.likelihood, inst.prior)));
  }
  const double secs = seconds_since(start);
  return {worst <= 1e-9 && secs < 10.0, fmt::format("max |err| {:.3e} over 1000 instances, {:.3f} s", worst, secs)};
}

Outcome eig_bounds() {
  int violations = 0;
  for (const auto& inst : instances()) {
    const double got = expected_information_gain(to_matrix(inst.likelihood), to_vector(inst.prior));
    const double bound = std::min(brute_entropy(inst.prior), std::log2(static_cast<double>(inst.likelihood[0].size())));
    if (got < 0.0 || got > bound + 1e-9) ++violations;
  }
  return {violations == 0, fmt::format("{} violations of 0 <= EIG <= min(H(prior), log2|A|)", violations)};
}

Outcome kl_oracle() {
  double worst = 0.0;
  for (const auto& inst : instances()) {
    const double got = expected_kl(to_matrix(inst.likelihood), to_vector(inst.prior));
    worst = std::max(worst, std::abs(got - brute_expected_kl(inst.likelihood, inst.prior)));
  }
  std::mt19937_64 rng(5);
  double identical = 0.0;
  for (int n = 0; n < 200; ++n) {
    const auto inst = random_instance(rng);
    Table same(inst.likelihood.size(), inst.likelihood.front());
    identical = std::max(identical, std::abs(expected_kl(to_matrix(same), to_vector(inst.prior))));
  }
  return {worst <= 1e-9 && identical <= 1e-12,
          fmt::format("max |err| {:.3e}; identical rows max {:.3e}", worst, identical)};
}

Outcome bayes() {
  const BeliefDistribution prior(Eigen::Vector2d(0.5, 0.5));
  const auto post = explicit_update(prior, Eigen::Vector2d(0.9, 0.3));
  double err = std::max(std::abs(post[0] - 0.75), std::abs(post[1] - 0.25));
  const auto p2 = explicit_update(BeliefDistribution(Eigen::Vector2d(0.2, 0.8)), Eigen::Vector2d(0.6, 0.1));
  err = std::max(err, std::abs(p2[0] - 0.12 / 0.2));  // 0.12 / (0.12 + 0.08)
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> size(1, 50);
  double worst_sum = 0.0;
  int negatives = 0;
  for (int n = 0; n < 10000; ++n) {
    const int k = size(rng);
    Eigen::VectorXd w(k), l(k);
    for (int i = 0; i < k; ++i) {
      w(i) = u(rng) + 1e-12;
      l(i) = u(rng) + 1e-12;
    }
    const auto p = explicit_update(BeliefDistribution::from_weights(w), l);
    worst_sum = std::max(worst_sum, std::abs(p.probs().sum() - 1.0));
    negatives += static_cast<int>((p.probs().array() < 0).count());
  }
  return {err <= 1e-12 && worst_sum <= 1e-12 && negatives == 0,
          fmt::format("closed-form err {:.3e}; 10000 updates max |sum-1| {:.3e}", err, worst_sum)};
}

std::vector<GameRecord> play(const World& w, SelectorKind s, PosteriorMode m, double corruption, std::size_t n,
                             std::uint64_t seed) {
  GameOptions o;
  o.selector = s;
  o.mode = m;
  o.corruption = corruption;
  o.max_turns = 10;
  o.pool_size = 20;
  const std::span<const QuerySpec> queries(w.world.queries.data(), n);
  return run_games(queries, *w.engine, o, seed, static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
}

std::vector<std::vector<GameRecord>> g_recorded;  // every game played, for the metric invariants

Outcome selector_trend(const World& w) {
  const auto start = Clock::now();
  const auto random = report(g_recorded.emplace_back(play(w, SelectorKind::random, PosteriorMode::language, 0.0, 300, 1)));
  const auto eig = report(g_recorded.emplace_back(play(w, SelectorKind::eig, PosteriorMode::language, 0.0, 300, 1)));
  const auto kl = report(g_recorded.emplace_back(play(w, SelectorKind::kl, PosteriorMode::language, 0.0, 300, 1)));
  const double secs = seconds_since(start);
  const double r = random.rate.back(), e = eig.rate.back(), k = kl.rate.back();
  return {e >= r + 0.10 && k >= r + 0.05 && secs < 120.0 && random.failed + eig.failed + kl.failed == 0,
          fmt::format("final top-1 rate: random {:.4f}, eig {:.4f}, kl {:.4f}; 900 games in {:.1f} s", r, e, k, secs)};
}

Outcome posterior_trend(const World& w) {
  const auto language = report(g_recorded.emplace_back(play(w, SelectorKind::eig, PosteriorMode::language, 0.2, 200, 2)));
  const auto expl = report(g_recorded.emplace_back(play(w, SelectorKind::eig, PosteriorMode::explicit_bayes, 0.2, 200, 2)));
  bool monotone = true;
  std::string curves;
  for (auto s : {SelectorKind::eig, SelectorKind::random}) {
    const auto clean = report(g_recorded.emplace_back(play(w, s, PosteriorMode::explicit_bayes, 0.0, 200, 2)));
    for (std::size_t t = 1; t < clean.mrr.size(); ++t) monotone = monotone && clean.mrr[t] >= clean.mrr[t - 1];
    curves += fmt::format("; clean explicit {} MRR {:.4f} -> {:.4f}", to_string(s), clean.mrr.front(), clean.mrr.back());
  }
  return {language.mrr.back() > expl.mrr.back() && monotone,
          fmt::format("20% corruption final MRR: language {:.4f}, explicit {:.4f}{}; non-decreasing {}",
                      language.mrr.back(), expl.mrr.back(), curves, monotone ? "yes" : "no")};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome metrics() {
  const std::vector<std::size_t> ranks{1, 4, 10};
  const bool exact = mrr(ranks) == 0.45;
  std::size_t games = 0, violations = 0;
  for (const auto& set : g_recorded) {
    games += set.size();
    const auto r = report(set);
    for (std::size_t t = 1; t < r.cumulative.size(); ++t)
      if (r.cumulative[t] < r.cumulative[t - 1] || r.cumulative[t] < r.rate[t]) ++violations;
  }
  MetricsReport golden;
  golden.mrr = {0.0, 0.3694};
  golden.rate = {0.0, 0.2739};
  golden.cumulative = {0.3054, 0.5838};
  golden.delta_cumulative = 0.2784;
  const bool layout = summary_csv(method_label(SelectorKind::random, PosteriorMode::explicit_bayes), golden) ==
                      read_file(CLARIFY_TEST_DATA_DIR "/summary_random_explicit.csv");
  return {exact && violations == 0 && layout,
          fmt::format("mrr([1,4,10]) == 0.45: {}; cumulative monotone over {} games: {}; golden summary row: {}",
                      exact ? "yes" : "no", games, violations == 0 ? "yes" : "no", layout ? "match" : "mismatch")};
}

Outcome synthesis_soundness(const World& w) {
  const std::span<const QuerySpec> queries(w.world.queries.data(), 40);
  SynthesisOptions o;
  o.games_per_query = 5;
  std::size_t violations = 0, checked = 0;
  o.rule = KeepRule::delta;
  const auto delta = synthesize(queries, *w.engine, o, 31);
  for (const auto& r : delta) {
    const QuerySpec* q = nullptr;
    for (std::size_t i = 0; i < queries.size() && !q; ++i)
      for (int g = 0; g < o.games_per_query; ++g)
        if (synthesis_game_seed(31, i, g) == r.meta.game_seed) q = &queries[i];
    if (!q) {
      ++violations;
      continue;
    }
    const auto game = run_game(*q, *w.engine, synthesis_game_options(o), r.meta.game_seed);
    const auto& t = game.turns.at(static_cast<std::size_t>(r.meta.turn - 1));
    ++checked;
    if (t.question != r.target_question || t.rank_before != r.meta.rank_before || t.rank_after != r.meta.rank_after ||
        !keep_question(t.rank_before, t.rank_after, o.rule) || r.contexts.empty() || r.contexts.size() > 3)
      ++violations;
  }
  o.rule = KeepRule::top10;
  const auto top10 = synthesize(queries, *w.engine, o, 31);
  std::set<std::string> delta_keys;
  for (auto r : delta) {
    r.meta.rule = KeepRule::top10;
    delta_keys.insert(record_to_json(r).dump());
  }
  std::size_t outside = 0;
  for (const auto& r : top10) outside += delta_keys.contains(record_to_json(r).dump()) ? 0 : 1;
  return {violations == 0 && outside == 0 && checked > 0,
          fmt::format("{} delta records replayed, {} violations; {} top10 records, {} outside delta", checked,
                      violations, top10.size(), outside)};
}

Outcome determinism() {
  const auto root = std::filesystem::temp_directory_path() / "clarify_acceptance_determinism";
  std::filesystem::remove_all(root);
  run_make_world(root / "world", 40, 8);
  const auto cfg = root / "config.json";
  std::ofstream(cfg) << config_to_json(world_config()).dump(2);
  std::vector<std::string> differing;
  for (int run = 0; run < 2; ++run) {
    EvaluateArgs e;
    e.corpus = root / "world" / "corpus.jsonl";
    e.queries = root / "world" / "queries.jsonl";
    e.config = cfg;
    e.corruption = 0.2;
    e.seed = 13;
    e.out_dir = root / fmt::format("eval{}", run);
    run_evaluate(e);
    SynthesizeArgs s;
    s.corpus = e.corpus;
    s.queries = e.queries;
    s.config = cfg;
    s.seed = 13;
    s.out = root / fmt::format("synth{}.jsonl", run);
    run_synthesize(s);
  }
  std::size_t bytes = 0;
  for (const auto* f : {"curves.csv", "summary.csv", "games.jsonl", "question_types.csv"}) {
    const auto a = read_file(root / "eval0" / f);
    bytes += a.size();
    if (a.empty() || a != read_file(root / "eval1" / f)) differing.push_back(f);
  }
  const auto s0 = read_file(root / "synth0.jsonl");
  bytes += s0.size();
  if (s0.empty() || s0 != read_file(root / "synth1.jsonl")) differing.push_back("records");
  std::filesystem::remove_all(root);
  return {differing.empty(), differing.empty() ? fmt::format("5 outputs, {} bytes, identical across runs", bytes)
                                               : fmt::format("differs: {}", fmt::join(differing, ", "))};
}

Outcome service(const World& w) {
  SessionOptions o;
  o.max_turns = 10;
  o.pool_size = 10;
  SessionStore store(*w.engine, o);
  Service svc(store);
  if (!svc.bind("127.0.0.1", 0)) return {false, "cannot bind"};
  std::thread server([&] { svc.serve(); });
  httplib::Client c("127.0.0.1", svc.port());
  for (int i = 0; i < 400 && !c.Get("/api/health"); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));

  std::string failure;
  auto post = [&](const std::string& path, const json& body) { return c.Post(path, body.dump(), "application/json"); };
  const auto created = post("/api/sessions", {{"query", "wizard school book"}});
  int answered = 0;
  bool done = false;
  if (!created || created->status != 201) {
    failure = "create failed";
  } else {
    const auto id = json::parse(created->body)["session_id"].get<std::string>();
    for (int i = 0; i < 9; ++i) {
      const auto r = post("/api/sessions/" + id + "/answer", {{"answer", "village"}});
      if (!r || r->status != 200) break;
      ++answered;
      done = json::parse(r->body)["done"].get<bool>();
      if (done != (i == 8)) break;
    }
  }
  // concurrent double-submit on a fresh session, three turns
  int turns_with_one_winner = 0;
  const auto second = post("/api/sessions", {{"query", "another search"}});
  if (second && second->status == 201) {
    const auto id = json::parse(second->body)["session_id"].get<std::string>();
    for (int turn = 1; turn <= 3; ++turn) {
      std::atomic<int> ok{0}, conflict{0};
      std::vector<std::thread> clients;
      for (int k = 0; k < 2; ++k) {
        clients.emplace_back([&] {
          httplib::Client cc("127.0.0.1", svc.port());
          const auto r = cc.Post("/api/sessions/" + id + "/answer", json{{"answer", "ocean"}, {"turn", turn}}.dump(),
                                 "application/json");
          if (r && r->status == 200) ++ok;
          if (r && r->status == 409) ++conflict;
        });
      }
      for (auto& t : clients) t.join();
      if (ok == 1 && conflict == 1) ++turns_with_one_winner;
    }
  }
  svc.stop();
  server.join();
  const bool pass = failure.empty() && answered == 9 && done && turns_with_one_winner == 3;
  return {pass, fmt::format("{} answers accepted, done={}, double-submit single winner on {}/3 turns{}", answered, done,
                            turns_with_one_winner, failure.empty() ? "" : "; " + failure)};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  const World world(300, 2024);
  int failures = 0;
  auto check = [&](const char* name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    failures += o.pass ? 0 : 1;
    fmt::print("{} {} | {}\n", o.pass ? "PASS" : "FAIL", name, o.detail);
    std::fflush(stdout);
  };
  check("eig_oracle_equivalence", eig_oracle);
  check("eig_bounds", eig_bounds);
  check("kl_oracle_equivalence", kl_oracle);
  check("bayes_posterior", bayes);
  check("selector_efficacy_trend", [&] { return selector_trend(world); });
  check("posterior_mode_trend", [&] { return posterior_trend(world); });
  check("metrics_correctness", metrics);
  check("synthesis_filter_soundness", [&] { return synthesis_soundness(world); });
  check("determinism", determinism);
  check("service_contract", [&] { return service(world); });
  fmt::print("{} of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
