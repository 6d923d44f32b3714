#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "clarify/corpus.hpp"
#include "clarify/embedding.hpp"
#include "clarify/math.hpp"
#include "clarify/oracles.hpp"
#include "clarify/types.hpp"

namespace clarify {

/// Added to every rectified cosine so each likelihood row can be normalized.
inline constexpr double kSimilarityOffset = 1e-9;

/// p(a | q, y) for one question over a set of candidates.
///
/// The outcome space is the set of distinct reference answers; row i is the
/// rectified-cosine similarity of every outcome to candidate i's own reference
/// answer, normalized to sum to one.
struct AnswerLikelihoodTable {
  std::string question;
  std::vector<std::size_t> candidates;         // corpus positions, descending belief
  std::vector<std::string> reference_answers;  // one per candidate
  std::vector<std::string> answer_support;     // distinct references, first-seen order
  std::vector<std::size_t> reference_outcome;  // candidate -> index into answer_support
  Eigen::MatrixXd support_embeddings;          // one unit (or zero) row per outcome
  Eigen::VectorXd row_normalizers;             // sum_k rectified-cosine(a_k, ref_i)
  Eigen::MatrixXd probs;                       // candidates x outcomes

  std::size_t num_candidates() const noexcept { return candidates.size(); }
  std::size_t num_answers() const noexcept { return answer_support.size(); }
};

/// max(cos, 0) + kSimilarityOffset.
double rectified_cosine(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b);

/// Builds the table from reference answers and one embedding row per reference.
AnswerLikelihoodTable make_similarity_table(std::string question, std::vector<std::size_t> candidates,
                                            std::vector<std::string> reference_answers,
                                            const Eigen::MatrixXd& reference_embeddings);

/// Positions of the `k` most probable items (k == 0 means all), ties in load order.
std::vector<std::size_t> top_k_positions(const BeliefDistribution& belief, std::size_t k);

/// Belief restricted to `positions` and renormalized. Falls back to uniform if
/// the restriction carries no mass.
Eigen::VectorXd restrict_belief(const BeliefDistribution& belief, const std::vector<std::size_t>& positions);

// Utilities over a row-stochastic likelihood matrix and a prior over its rows.

/// p(a | q) = sum_y p(a | q, y) p(y).
template <typename DerivedL, typename DerivedP>
Eigen::VectorXd answer_marginal(const Eigen::MatrixBase<DerivedL>& likelihood, const Eigen::MatrixBase<DerivedP>& prior) {
  return likelihood.transpose() * prior;
}

/// H(A | q) - E_y[H(A | q, y)] in bits, clamped at zero.
template <typename DerivedL, typename DerivedP>
double expected_information_gain(const Eigen::MatrixBase<DerivedL>& likelihood,
                                 const Eigen::MatrixBase<DerivedP>& prior) {
  const Eigen::VectorXd marginal = answer_marginal(likelihood, prior);
  const double gain = entropy_bits(marginal) - prior.dot(row_entropies_bits(likelihood));
  return gain > 0 ? gain : 0.0;
}

/// sum_a p(a | q) KL(p(y | q, a) || p(y)) in bits, clamped at zero.
template <typename DerivedL, typename DerivedP>
double expected_kl(const Eigen::MatrixBase<DerivedL>& likelihood, const Eigen::MatrixBase<DerivedP>& prior) {
  const Eigen::VectorXd marginal = answer_marginal(likelihood, prior);
  double total = 0.0;
  for (Eigen::Index a = 0; a < likelihood.cols(); ++a) {
    if (!(marginal(a) > 0)) continue;
    const Eigen::VectorXd posterior = prior.cwiseProduct(likelihood.col(a)) / marginal(a);
    total += marginal(a) * kl_divergence_bits(posterior, prior);
  }
  return total > 0 ? total : 0.0;
}

Eigen::VectorXd answer_marginal(const AnswerLikelihoodTable& table, const BeliefDistribution& belief);
double eig(const AnswerLikelihoodTable& table, const BeliefDistribution& belief);
double kl_utility(const AnswerLikelihoodTable& table, const BeliefDistribution& belief);

/// Alternative KL score: each candidate's mean reference-answer cosine to all
/// candidates, normalized into a distribution, scored as KL against the prior.
double kl_utility_mean_cosine(const AnswerLikelihoodTable& table, const BeliefDistribution& belief);

/// Source of answer likelihood tables. The similarity model below is the built-in
/// one; a generator with token log-probabilities can provide another.
class AnswerLikelihoodModel {
 public:
  virtual ~AnswerLikelihoodModel() = default;
  virtual AnswerLikelihoodTable build(std::string_view question, const BeliefDistribution& belief) const = 0;
  /// p(answer | q, y) for each table candidate; an answer equal to an outcome
  /// reproduces that column exactly.
  virtual Eigen::VectorXd observed_likelihood(const AnswerLikelihoodTable& table, std::string_view answer) const = 0;
};

class SimilarityLikelihoodModel final : public AnswerLikelihoodModel {
 public:
  SimilarityLikelihoodModel(const Corpus& corpus, std::shared_ptr<const Embedder> embedder,
                            std::shared_ptr<const Answerer> answerer, std::size_t top_k);

  /// Queries the answerer once per candidate. Answerer failures are rethrown as
  /// OracleError naming the candidate.
  AnswerLikelihoodTable build(std::string_view question, const BeliefDistribution& belief) const override;
  Eigen::VectorXd observed_likelihood(const AnswerLikelihoodTable& table, std::string_view answer) const override;

  std::size_t top_k() const noexcept { return top_k_; }

 private:
  const Corpus* corpus_;
  std::shared_ptr<const Embedder> embedder_;
  std::shared_ptr<const Answerer> answerer_;
  std::size_t top_k_;
};

struct SelectionContext {
  const AnswerLikelihoodModel* likelihood = nullptr;
  const ExternalQuestionSource* external = nullptr;
  bool kl_mean_cosine = false;
  // Needed by the external selector only.
  const InteractionHistory* history = nullptr;
  std::vector<std::string> candidate_blocks;
};

struct Selection {
  std::string question;
  std::size_t index = 0;                    // position in the pool (0 for external)
  std::vector<double> scores;               // per pool question; empty for random/external
  std::vector<AnswerLikelihoodTable> tables;  // per pool question when scored
};

/// Picks the next question.
///   random   -> uniform draw seeded by `seed`
///   eig / kl -> argmax utility, first in pool order on ties
///   external -> the endpoint's question; the pool is ignored
Selection select_question(SelectorKind kind, const CandidatePool& pool, const BeliefDistribution& belief,
                          const SelectionContext& context, std::uint64_t seed);

}  // namespace clarify
