#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "clarify/config.hpp"
#include "clarify/engine.hpp"
#include "clarify/synthetic.hpp"

namespace clarify::testing {

using Table = std::vector<std::vector<double>>;

// Brute-force references, written without Eigen or library helpers.

inline double plogp2(double p) { return p > 0 ? p * std::log(p) / std::log(2.0) : 0.0; }

inline std::vector<double> brute_marginal(const Table& lik, const std::vector<double>& prior) {
  std::vector<double> m(lik.front().size(), 0.0);
  for (std::size_t y = 0; y < lik.size(); ++y)
    for (std::size_t a = 0; a < m.size(); ++a) m[a] += prior[y] * lik[y][a];
  return m;
}

// H(A|q) - sum_y p(y) H(A|q,y)
inline double brute_eig(const Table& lik, const std::vector<double>& prior) {
  double h_marginal = 0.0;
  for (double m : brute_marginal(lik, prior)) h_marginal -= plogp2(m);
  double h_conditional = 0.0;
  for (std::size_t y = 0; y < lik.size(); ++y) {
    double h = 0.0;
    for (double l : lik[y]) h -= plogp2(l);
    h_conditional += prior[y] * h;
  }
  return h_marginal - h_conditional;
}

// sum_a p(a|q) KL(p(y|q,a) || p(y)), posterior by explicit Bayes rule
inline double brute_expected_kl(const Table& lik, const std::vector<double>& prior) {
  const auto marginal = brute_marginal(lik, prior);
  double total = 0.0;
  for (std::size_t a = 0; a < marginal.size(); ++a) {
    if (marginal[a] <= 0) continue;
    double kl = 0.0;
    for (std::size_t y = 0; y < prior.size(); ++y) {
      const double post = prior[y] * lik[y][a] / marginal[a];
      if (post > 0) kl += post * std::log2(post / prior[y]);
    }
    total += marginal[a] * kl;
  }
  return total;
}

inline double brute_entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p) h -= plogp2(x);
  return h;
}

struct Instance {
  Table likelihood;
  std::vector<double> prior;
};

// <=5 candidates, <=4 answers, occasional exact zeros in rows and prior.
inline Instance random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> ny(1, 5), na(1, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int rows = ny(rng);
  const int cols = na(rng);
  Instance inst;
  auto normalized = [&](int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    double s = 0.0;
    while (s <= 0) {
      s = 0.0;
      for (auto& x : v) {
        x = u(rng) < 0.15 ? 0.0 : u(rng);
        s += x;
      }
    }
    for (auto& x : v) x /= s;
    return v;
  };
  for (int y = 0; y < rows; ++y) inst.likelihood.push_back(normalized(cols));
  inst.prior = normalized(rows);
  return inst;
}

inline Eigen::MatrixXd to_matrix(const Table& t) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(t.size()), static_cast<Eigen::Index>(t.front().size()));
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < t[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t[i][j];
  return m;
}

inline Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Mock oracles with open facet questions, every corpus item scored.
inline Config world_config() {
  Config c;
  c.selection.top_k = 0;
  c.oracles.backend = "mock";
  c.oracles.mock_style = "open";
  return c;
}

struct World {
  SyntheticWorld world;
  std::unique_ptr<Engine> engine;

  explicit World(std::size_t queries = 50, std::uint64_t seed = 11, Config config = world_config())
      : world(make_synthetic_world(queries, seed)), engine(std::make_unique<Engine>(world.corpus, std::move(config))) {}
};

}  // namespace clarify::testing
