#include "clarify/belief.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "clarify/error.hpp"

namespace clarify {

BeliefDistribution explicit_update(const BeliefDistribution& prior, const Eigen::VectorXd& likelihoods) {
  if (static_cast<std::size_t>(likelihoods.size()) != prior.size())
    throw ValidationError(fmt::format("{} likelihoods for a belief over {} items", likelihoods.size(), prior.size()));
  if ((likelihoods.array() < 0).any() || !likelihoods.allFinite())
    throw ValidationError("likelihoods must be finite and non-negative");
  const Eigen::VectorXd joint = prior.probs().cwiseProduct(likelihoods);
  const double evidence = joint.sum();
  if (!(evidence > 0)) throw DegenerateEvidenceError("evidence assigns zero probability to every candidate");
  return BeliefDistribution::from_weights(joint / evidence);
}

Eigen::VectorXd apply_likelihood_floor(const Eigen::VectorXd& likelihoods, double floor) {
  return ((1.0 - floor) * likelihoods.array() + floor).matrix();
}

std::string language_posterior_query(const InteractionHistory& history, const Summarizer& summarizer,
                                     int answer_weight) {
  if (history.turns.empty()) return history.initial_query;
  std::vector<std::string> texts{history.initial_query};
  for (const auto& turn : history.turns) {
    for (int r = 0; r < answer_weight; ++r) texts.push_back(turn.answer);
  }
  return summarizer.condense(texts);
}

Eigen::VectorXd corpus_likelihoods(const AnswerLikelihoodTable& table, const AnswerLikelihoodModel& model,
                                   std::string_view answer, const BeliefDistribution& prior) {
  const Eigen::VectorXd inside = model.observed_likelihood(table, answer);
  const double predictive = restrict_belief(prior, table.candidates).dot(inside);
  Eigen::VectorXd out = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(prior.size()), predictive);
  for (std::size_t i = 0; i < table.candidates.size(); ++i)
    out(static_cast<Eigen::Index>(table.candidates[i])) = inside(static_cast<Eigen::Index>(i));
  return out;
}

BeliefDistribution update_belief(PosteriorMode mode, const BeliefDistribution& prior,
                                 const InteractionHistory& history, const BeliefDeps& deps,
                                 const AnswerLikelihoodTable* table) {
  if (mode == PosteriorMode::language) {
    if (!deps.retriever || !deps.summarizer) throw ValidationError("language posterior needs retriever and summarizer");
    return deps.retriever->retrieve(language_posterior_query(history, *deps.summarizer, deps.answer_weight));
  }
  if (history.turns.empty()) return prior;
  if (!deps.likelihood) throw ValidationError("explicit posterior needs a likelihood model");
  const auto& last = history.turns.back();
  AnswerLikelihoodTable built;
  if (!table || table->question != last.question) {
    built = deps.likelihood->build(last.question, prior);
    table = &built;
  }
  const auto likelihoods =
      apply_likelihood_floor(corpus_likelihoods(*table, *deps.likelihood, last.answer, prior), deps.likelihood_floor);
  try {
    return explicit_update(prior, likelihoods);
  } catch (const DegenerateEvidenceError& e) {
    spdlog::warn("explicit update for '{}' is degenerate ({}); keeping the prior", last.question, e.what());
    return prior;
  }
}

}  // namespace clarify
