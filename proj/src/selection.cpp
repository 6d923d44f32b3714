#include "clarify/selection.hpp"

#include <unordered_map>

#include <fmt/format.h>

#include "clarify/error.hpp"
#include "clarify/rng.hpp"

namespace clarify {

double rectified_cosine(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b) {
  return std::max(cosine_similarity(a, b), 0.0) + kSimilarityOffset;
}

AnswerLikelihoodTable make_similarity_table(std::string question, std::vector<std::size_t> candidates,
                                            std::vector<std::string> reference_answers,
                                            const Eigen::MatrixXd& reference_embeddings) {
  if (candidates.empty()) throw ValidationError("likelihood table needs at least one candidate");
  if (reference_answers.size() != candidates.size() ||
      static_cast<std::size_t>(reference_embeddings.rows()) != candidates.size())
    throw ValidationError("likelihood table inputs disagree in length");

  AnswerLikelihoodTable table;
  table.question = std::move(question);
  table.candidates = std::move(candidates);
  table.reference_answers = std::move(reference_answers);

  std::unordered_map<std::string, std::size_t> outcome_of;
  std::vector<Eigen::Index> outcome_rows;
  table.reference_outcome.reserve(table.candidates.size());
  for (std::size_t i = 0; i < table.reference_answers.size(); ++i) {
    const auto [it, inserted] = outcome_of.emplace(table.reference_answers[i], table.answer_support.size());
    if (inserted) {
      table.answer_support.push_back(table.reference_answers[i]);
      outcome_rows.push_back(static_cast<Eigen::Index>(i));
    }
    table.reference_outcome.push_back(it->second);
  }

  const auto outcomes = static_cast<Eigen::Index>(table.answer_support.size());
  table.support_embeddings.resize(outcomes, reference_embeddings.cols());
  for (Eigen::Index k = 0; k < outcomes; ++k) {
    Eigen::VectorXd v = reference_embeddings.row(outcome_rows[static_cast<std::size_t>(k)]).transpose();
    const double n = v.norm();
    table.support_embeddings.row(k) = (n > 0 ? Eigen::VectorXd(v / n) : v).transpose();
  }

  // Similarity between outcomes; every candidate's row is the row of its own outcome.
  Eigen::MatrixXd cosines = table.support_embeddings * table.support_embeddings.transpose();
  // An outcome is identical to itself even when its embedding is all-zero.
  cosines.diagonal().setOnes();
  const Eigen::MatrixXd similarity = (cosines.array().max(0.0) + kSimilarityOffset).matrix();
  const Eigen::VectorXd outcome_norm = similarity.rowwise().sum();

  const auto rows = static_cast<Eigen::Index>(table.candidates.size());
  table.probs.resize(rows, outcomes);
  table.row_normalizers.resize(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto own = static_cast<Eigen::Index>(table.reference_outcome[static_cast<std::size_t>(i)]);
    table.row_normalizers(i) = outcome_norm(own);
    table.probs.row(i) = similarity.row(own) / outcome_norm(own);
  }
  return table;
}

std::vector<std::size_t> top_k_positions(const BeliefDistribution& belief, std::size_t k) {
  auto order = belief.ranking();
  if (k > 0 && order.size() > k) order.resize(k);
  return order;
}

Eigen::VectorXd restrict_belief(const BeliefDistribution& belief, const std::vector<std::size_t>& positions) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(positions.size()));
  for (std::size_t i = 0; i < positions.size(); ++i) out(static_cast<Eigen::Index>(i)) = belief[positions[i]];
  const double total = out.sum();
  if (!(total > 0)) return Eigen::VectorXd::Constant(out.size(), 1.0 / static_cast<double>(out.size()));
  return out / total;
}

Eigen::VectorXd answer_marginal(const AnswerLikelihoodTable& table, const BeliefDistribution& belief) {
  return answer_marginal(table.probs, restrict_belief(belief, table.candidates));
}

double eig(const AnswerLikelihoodTable& table, const BeliefDistribution& belief) {
  return expected_information_gain(table.probs, restrict_belief(belief, table.candidates));
}

double kl_utility(const AnswerLikelihoodTable& table, const BeliefDistribution& belief) {
  return expected_kl(table.probs, restrict_belief(belief, table.candidates));
}

double kl_utility_mean_cosine(const AnswerLikelihoodTable& table, const BeliefDistribution& belief) {
  const Eigen::VectorXd prior = restrict_belief(belief, table.candidates);
  Eigen::MatrixXd cosines = table.support_embeddings * table.support_embeddings.transpose();
  cosines.diagonal().setOnes();
  const auto n = static_cast<Eigen::Index>(table.candidates.size());
  Eigen::VectorXd shifted(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto oi = static_cast<Eigen::Index>(table.reference_outcome[static_cast<std::size_t>(i)]);
    double mean = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      mean += cosines(oi, static_cast<Eigen::Index>(table.reference_outcome[static_cast<std::size_t>(j)]));
    shifted(i) = std::max(mean / static_cast<double>(n), 0.0) + kSimilarityOffset;
  }
  shifted /= shifted.sum();
  return std::max(kl_divergence_bits(shifted, prior), 0.0);
}

// Similarity model -----------------------------------------------------------

SimilarityLikelihoodModel::SimilarityLikelihoodModel(const Corpus& corpus, std::shared_ptr<const Embedder> embedder,
                                                     std::shared_ptr<const Answerer> answerer, std::size_t top_k)
    : corpus_(&corpus), embedder_(std::move(embedder)), answerer_(std::move(answerer)), top_k_(top_k) {}

AnswerLikelihoodTable SimilarityLikelihoodModel::build(std::string_view question,
                                                       const BeliefDistribution& belief) const {
  auto candidates = top_k_positions(belief, top_k_);
  std::vector<const Item*> items;
  items.reserve(candidates.size());
  for (auto pos : candidates) items.push_back(&(*corpus_)[pos]);

  std::vector<std::string> answers;
  try {
    answers = answerer_->answer_many(question, items);
  } catch (const OracleError&) {
    throw;
  } catch (const std::exception& e) {
    throw OracleError(fmt::format("answering '{}' for the candidate set failed: {}", question, e.what()));
  }

  // Embed each distinct answer once.
  std::unordered_map<std::string, Eigen::Index> first_row;
  std::vector<std::string> distinct;
  for (const auto& a : answers) {
    if (first_row.emplace(a, static_cast<Eigen::Index>(distinct.size())).second) distinct.push_back(a);
  }
  const Eigen::MatrixXd distinct_vectors = embedder_->embed_batch(distinct);
  Eigen::MatrixXd reference_vectors(static_cast<Eigen::Index>(answers.size()), distinct_vectors.cols());
  for (std::size_t i = 0; i < answers.size(); ++i)
    reference_vectors.row(static_cast<Eigen::Index>(i)) = distinct_vectors.row(first_row.at(answers[i]));

  return make_similarity_table(std::string(question), std::move(candidates), std::move(answers), reference_vectors);
}

Eigen::VectorXd SimilarityLikelihoodModel::observed_likelihood(const AnswerLikelihoodTable& table,
                                                               std::string_view answer) const {
  const auto hit = std::find(table.answer_support.begin(), table.answer_support.end(), answer);
  if (hit != table.answer_support.end()) return table.probs.col(hit - table.answer_support.begin());

  Eigen::VectorXd observed = embedder_->embed(answer);
  const double n = observed.norm();
  if (n > 0) observed /= n;
  const auto rows = static_cast<Eigen::Index>(table.candidates.size());
  Eigen::VectorXd out(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto own = static_cast<Eigen::Index>(table.reference_outcome[static_cast<std::size_t>(i)]);
    const double sim = std::max(observed.dot(table.support_embeddings.row(own).transpose()), 0.0) + kSimilarityOffset;
    out(i) = sim / table.row_normalizers(i);
  }
  return out;
}

// Selection ------------------------------------------------------------------

Selection select_question(SelectorKind kind, const CandidatePool& pool, const BeliefDistribution& belief,
                          const SelectionContext& context, std::uint64_t seed) {
  Selection out;
  if (kind == SelectorKind::external) {
    if (!context.external) throw ValidationError("external selector requested without an endpoint");
    if (!context.history) throw ValidationError("external selector needs the interaction history");
    out.question = context.external->next_question(*context.history, context.candidate_blocks);
    return out;
  }
  if (pool.empty()) throw ValidationError("cannot select from an empty pool");
  if (kind == SelectorKind::random) {
    Rng rng(seed);
    out.index = static_cast<std::size_t>(rng.index(pool.size()));
    out.question = pool.questions[out.index];
    return out;
  }
  if (!context.likelihood) throw ValidationError("scored selection needs a likelihood model");
  out.scores.reserve(pool.size());
  out.tables.reserve(pool.size());
  for (const auto& q : pool.questions) {
    auto table = context.likelihood->build(q, belief);
    double score = 0.0;
    if (kind == SelectorKind::eig) {
      score = eig(table, belief);
    } else {
      score = context.kl_mean_cosine ? kl_utility_mean_cosine(table, belief) : kl_utility(table, belief);
    }
    out.scores.push_back(score);
    out.tables.push_back(std::move(table));
  }
  for (std::size_t i = 1; i < out.scores.size(); ++i) {
    if (out.scores[i] > out.scores[out.index]) out.index = i;
  }
  out.question = pool.questions[out.index];
  return out;
}

}  // namespace clarify
