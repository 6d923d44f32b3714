#include "clarify/engine.hpp"

namespace clarify {

Engine::Engine(const Corpus& corpus, Config config, std::optional<Oracles> oracles)
    : corpus_(&corpus), config_(std::move(config)) {
  config_.validate();
  oracles_ = oracles ? std::move(*oracles) : make_oracles(config_.oracles);
  embedder_ = make_embedder(config_.retriever, config_.oracles.timeout_ms);
  retriever_ = std::make_unique<Retriever>(corpus, embedder_, config_.retriever.temperature);
  likelihood_ = std::make_unique<SimilarityLikelihoodModel>(
      corpus, embedder_, std::make_shared<MemoizingAnswerer>(oracles_.answerer),
      static_cast<std::size_t>(config_.selection.top_k));
  if (!config_.selection.endpoint.empty())
    external_.emplace(config_.selection.endpoint, config_.oracles.timeout_ms);
}

BeliefDeps Engine::belief_deps() const {
  return BeliefDeps{retriever_.get(), oracles_.summarizer.get(), likelihood_.get(),
                    config_.posterior.likelihood_floor, config_.posterior.answer_weight};
}

SelectionContext Engine::selection_context(const InteractionHistory& history,
                                           std::vector<std::string> candidate_blocks) const {
  SelectionContext ctx;
  ctx.likelihood = likelihood_.get();
  ctx.external = external();
  ctx.kl_mean_cosine = config_.selection.kl_mean_cosine;
  ctx.history = &history;
  ctx.candidate_blocks = std::move(candidate_blocks);
  return ctx;
}

}  // namespace clarify
