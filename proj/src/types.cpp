#include "clarify/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include <fmt/format.h>

#include "clarify/error.hpp"
#include "clarify/text.hpp"

namespace clarify {

BeliefDistribution::BeliefDistribution(Eigen::VectorXd probs) : probs_(std::move(probs)) {
  if (probs_.size() == 0) throw ValidationError("belief distribution must be non-empty");
  for (Eigen::Index i = 0; i < probs_.size(); ++i) {
    if (!std::isfinite(probs_(i)) || probs_(i) < 0)
      throw ValidationError(fmt::format("belief entry {} is not a probability: {}", i, probs_(i)));
  }
  const double total = probs_.sum();
  if (std::abs(total - 1.0) > 1e-9)
    throw ValidationError(fmt::format("belief sums to {:.12f}, expected 1", total));
}

BeliefDistribution BeliefDistribution::from_weights(const Eigen::VectorXd& weights) {
  if (weights.size() == 0) throw ValidationError("belief distribution must be non-empty");
  if ((weights.array() < 0).any() || !weights.allFinite())
    throw ValidationError("belief weights must be finite and non-negative");
  const double total = weights.sum();
  if (!(total > 0)) throw DegenerateEvidenceError("all belief weights are zero");
  BeliefDistribution out;
  out.probs_ = weights / total;
  return out;
}

BeliefDistribution BeliefDistribution::uniform(std::size_t n) {
  if (n == 0) throw ValidationError("belief distribution must be non-empty");
  BeliefDistribution out;
  out.probs_ = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
  return out;
}

std::vector<std::size_t> BeliefDistribution::ranking() const {
  std::vector<std::size_t> order(size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
    return probs_(static_cast<Eigen::Index>(a)) > probs_(static_cast<Eigen::Index>(b));
  });
  return order;
}

std::size_t BeliefDistribution::rank_of_position(std::size_t pos) const {
  if (pos >= size()) throw NotFoundError(fmt::format("position {} outside belief of size {}", pos, size()));
  // Items strictly more probable, plus equally probable items loaded earlier.
  const double p = probs_(static_cast<Eigen::Index>(pos));
  std::size_t rank = 1;
  for (std::size_t i = 0; i < size(); ++i) {
    const double q = probs_(static_cast<Eigen::Index>(i));
    if (q > p || (q == p && i < pos)) ++rank;
  }
  return rank;
}

std::string_view to_string(PosteriorMode mode) {
  return mode == PosteriorMode::language ? "language" : "explicit";
}

std::string_view to_string(SelectorKind kind) {
  switch (kind) {
    case SelectorKind::random: return "random";
    case SelectorKind::eig: return "eig";
    case SelectorKind::kl: return "kl";
    case SelectorKind::external: return "external";
  }
  return "random";
}

std::string_view to_string(QuestionType type) {
  switch (type) {
    case QuestionType::describe: return "describe";
    case QuestionType::binary: return "binary";
    case QuestionType::character: return "character";
    case QuestionType::event: return "event";
    case QuestionType::other: return "other";
  }
  return "other";
}

PosteriorMode parse_posterior_mode(std::string_view text) {
  const auto t = text::to_lower(text::trim(text));
  if (t == "language") return PosteriorMode::language;
  if (t == "explicit") return PosteriorMode::explicit_bayes;
  throw ValidationError(fmt::format("unknown posterior mode '{}'", text));
}

SelectorKind parse_selector_kind(std::string_view text) {
  const auto t = text::to_lower(text::trim(text));
  if (t == "random") return SelectorKind::random;
  if (t == "eig") return SelectorKind::eig;
  if (t == "kl") return SelectorKind::kl;
  if (t == "external") return SelectorKind::external;
  throw ValidationError(fmt::format("unknown selector '{}'", text));
}

QuestionType parse_question_type(std::string_view text) {
  const auto t = text::to_lower(text::trim(text));
  for (auto type : {QuestionType::describe, QuestionType::binary, QuestionType::character,
                    QuestionType::event, QuestionType::other}) {
    if (t == to_string(type)) return type;
  }
  throw ValidationError(fmt::format("unknown question type '{}'", text));
}

std::string normalize_question(std::string_view question) {
  return text::to_lower(text::collapse_whitespace(question));
}

CandidatePool make_pool(const std::vector<std::string>& questions, int turn) {
  CandidatePool pool;
  pool.turn = turn;
  std::unordered_set<std::string> seen;
  for (const auto& q : questions) {
    auto cleaned = text::collapse_whitespace(q);
    if (cleaned.empty()) continue;
    if (seen.insert(text::to_lower(cleaned)).second) pool.questions.push_back(std::move(cleaned));
  }
  return pool;
}

}  // namespace clarify
