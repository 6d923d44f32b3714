#pragma once

#include <memory>
#include <optional>

#include "clarify/belief.hpp"
#include "clarify/config.hpp"
#include "clarify/corpus.hpp"
#include "clarify/oracles.hpp"
#include "clarify/retriever.hpp"
#include "clarify/selection.hpp"

namespace clarify {

/// Everything a turn needs, wired from one Config. The corpus must outlive the engine.
class Engine {
 public:
  /// Oracles default to make_oracles(config.oracles).
  Engine(const Corpus& corpus, Config config, std::optional<Oracles> oracles = std::nullopt);

  const Corpus& corpus() const noexcept { return *corpus_; }
  const Config& config() const noexcept { return config_; }
  const Retriever& retriever() const noexcept { return *retriever_; }
  const Oracles& oracles() const noexcept { return oracles_; }
  const SimilarityLikelihoodModel& likelihood() const noexcept { return *likelihood_; }
  const ExternalQuestionSource* external() const noexcept { return external_ ? &*external_ : nullptr; }

  BeliefDeps belief_deps() const;
  SelectionContext selection_context(const InteractionHistory& history,
                                     std::vector<std::string> candidate_blocks) const;

 private:
  const Corpus* corpus_;
  Config config_;
  Oracles oracles_;
  std::shared_ptr<const Embedder> embedder_;
  std::unique_ptr<Retriever> retriever_;
  std::unique_ptr<SimilarityLikelihoodModel> likelihood_;
  std::optional<ExternalQuestionSource> external_;
};

}  // namespace clarify
