#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace clarify {

/// Probability vector over corpus items, aligned with corpus load order.
///
/// Entries are non-negative and sum to one (within 1e-9). Construction from
/// raw weights normalizes; construction from probabilities validates.
class BeliefDistribution {
 public:
  BeliefDistribution() = default;

  /// Validates `probs` as a distribution; throws ValidationError otherwise.
  explicit BeliefDistribution(Eigen::VectorXd probs);

  /// Normalizes non-negative weights. Throws DegenerateEvidenceError when all are zero.
  static BeliefDistribution from_weights(const Eigen::VectorXd& weights);
  static BeliefDistribution uniform(std::size_t n);

  std::size_t size() const noexcept { return static_cast<std::size_t>(probs_.size()); }
  bool empty() const noexcept { return probs_.size() == 0; }
  const Eigen::VectorXd& probs() const noexcept { return probs_; }
  double operator[](std::size_t i) const { return probs_(static_cast<Eigen::Index>(i)); }

  /// Positions sorted by descending probability; ties keep load order.
  std::vector<std::size_t> ranking() const;

  /// 1-based rank of position `pos` under ranking().
  std::size_t rank_of_position(std::size_t pos) const;

 private:
  Eigen::VectorXd probs_;
};

struct Turn {
  std::string question;
  std::string answer;

  bool operator==(const Turn&) const = default;
};

struct InteractionHistory {
  std::string initial_query;
  std::vector<Turn> turns;

  bool operator==(const InteractionHistory&) const = default;
};

enum class PosteriorMode { explicit_bayes, language };
enum class SelectorKind { random, eig, kl, external };
enum class QuestionType { describe, binary, character, event, other };

std::string_view to_string(PosteriorMode mode);
std::string_view to_string(SelectorKind kind);
std::string_view to_string(QuestionType type);
PosteriorMode parse_posterior_mode(std::string_view text);
SelectorKind parse_selector_kind(std::string_view text);
QuestionType parse_question_type(std::string_view text);

/// Clarification questions proposed for one turn; deduplicated on normalized text.
struct CandidatePool {
  std::vector<std::string> questions;
  int turn = 0;

  bool empty() const noexcept { return questions.empty(); }
  std::size_t size() const noexcept { return questions.size(); }
};

/// Lowercase, trimmed, internal whitespace collapsed. Used as the pool dedupe key.
std::string normalize_question(std::string_view question);

/// Builds a pool keeping the first occurrence of each normalized question.
CandidatePool make_pool(const std::vector<std::string>& questions, int turn);

}  // namespace clarify
