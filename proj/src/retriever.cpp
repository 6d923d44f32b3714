#include "clarify/retriever.hpp"

#include <fmt/format.h>

#include "clarify/error.hpp"
#include "clarify/math.hpp"

namespace clarify {

std::string item_embedding_text(const Item& item) {
  return item.title + "\n" + item.author + "\n" + item.description;
}

Retriever::Retriever(const Corpus& corpus, std::shared_ptr<const Embedder> embedder, double temperature)
    : corpus_(&corpus), embedder_(std::move(embedder)), temperature_(temperature) {
  if (corpus.empty()) throw ValidationError("cannot build a retriever over an empty corpus");
  if (!(temperature > 0)) throw ValidationError("retriever temperature must be positive");
  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const auto& item : corpus) texts.push_back(item_embedding_text(item));
  item_vectors_ = embedder_->embed_batch(texts);
}

Eigen::VectorXd Retriever::scores(std::string_view query) const {
  return item_vectors_ * embedder_->embed(query);
}

BeliefDistribution Retriever::retrieve(std::string_view query) const {
  return BeliefDistribution(softmax(scores(query), temperature_));
}

std::size_t rank_of(const BeliefDistribution& belief, std::string_view id, const Corpus& corpus) {
  if (belief.size() != corpus.size())
    throw ValidationError(fmt::format("belief size {} does not match corpus size {}", belief.size(), corpus.size()));
  return belief.rank_of_position(corpus.position_of(id));
}

}  // namespace clarify
