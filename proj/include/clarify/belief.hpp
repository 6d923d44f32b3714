#pragma once

#include <string>

#include <Eigen/Dense>

#include "clarify/oracles.hpp"
#include "clarify/retriever.hpp"
#include "clarify/selection.hpp"
#include "clarify/types.hpp"

namespace clarify {

/// Bayes rule: posterior_i ∝ prior_i * likelihood_i.
/// Throws DegenerateEvidenceError when every product is zero.
BeliefDistribution explicit_update(const BeliefDistribution& prior, const Eigen::VectorXd& likelihoods);

/// (1 - floor) * L + floor, elementwise.
Eigen::VectorXd apply_likelihood_floor(const Eigen::VectorXd& likelihoods, double floor);

/// Initial query plus every answer (each repeated `answer_weight` times) condensed
/// into one description. Questions are not part of the input. With no turns the
/// initial query is returned as is and the summarizer is not called.
std::string language_posterior_query(const InteractionHistory& history, const Summarizer& summarizer,
                                     int answer_weight = 1);

/// Likelihood of `answer` for every corpus item. Items inside the table get the
/// similarity likelihood; items outside it get the predictive p(answer | q),
/// i.e. the evidence carries no information about them.
Eigen::VectorXd corpus_likelihoods(const AnswerLikelihoodTable& table, const AnswerLikelihoodModel& model,
                                   std::string_view answer, const BeliefDistribution& prior);

struct BeliefDeps {
  const Retriever* retriever = nullptr;
  const Summarizer* summarizer = nullptr;
  const AnswerLikelihoodModel* likelihood = nullptr;
  double likelihood_floor = 1e-6;
  int answer_weight = 1;
};

/// Belief after the last turn of `history` (which must already contain it).
///   language -> retrieve(language_posterior_query(history))
///   explicit -> Bayes update of `prior` with the answer's likelihoods; `table`
///               may carry the question's already-built table. Degenerate
///               evidence keeps the prior and logs a warning.
BeliefDistribution update_belief(PosteriorMode mode, const BeliefDistribution& prior,
                                 const InteractionHistory& history, const BeliefDeps& deps,
                                 const AnswerLikelihoodTable* table = nullptr);

}  // namespace clarify
