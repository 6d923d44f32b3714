#pragma once

#include <memory>
#include <string_view>

#include <Eigen/Dense>

#include "clarify/corpus.hpp"
#include "clarify/embedding.hpp"
#include "clarify/types.hpp"

namespace clarify {

/// Text indexed for an item: title, author and description separated by newlines.
std::string item_embedding_text(const Item& item);

/// Dot-product scorer over precomputed item embeddings; softmax turns scores into a belief.
class Retriever {
 public:
  /// Embeds every corpus item up front. Throws ValidationError on an empty corpus
  /// or non-positive temperature.
  Retriever(const Corpus& corpus, std::shared_ptr<const Embedder> embedder, double temperature = 1.0);

  const Corpus& corpus() const noexcept { return *corpus_; }
  const Embedder& embedder() const noexcept { return *embedder_; }
  double temperature() const noexcept { return temperature_; }

  /// Raw dot products, one per item in corpus order.
  Eigen::VectorXd scores(std::string_view query) const;
  BeliefDistribution retrieve(std::string_view query) const;

 private:
  const Corpus* corpus_;
  std::shared_ptr<const Embedder> embedder_;
  double temperature_;
  Eigen::MatrixXd item_vectors_;  // rows follow corpus order
};

/// 1-based rank of `id` under `belief`, ties broken by load order. Throws NotFoundError.
std::size_t rank_of(const BeliefDistribution& belief, std::string_view id, const Corpus& corpus);

}  // namespace clarify
