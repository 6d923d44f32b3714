#include <gtest/gtest.h>

#include <random>

#include "clarify/error.hpp"
#include "clarify/selection.hpp"
#include "support.hpp"

using namespace clarify;
using namespace clarify::testing;

TEST(Utility, EigMatchesBruteForce) {
  std::mt19937_64 rng(20240611);
  for (int n = 0; n < 1000; ++n) {
    const auto inst = random_instance(rng);
    const double got = expected_information_gain(to_matrix(inst.likelihood), to_vector(inst.prior));
    EXPECT_NEAR(got, brute_eig(inst.likelihood, inst.prior), 1e-9) << "instance " << n;
  }
}

TEST(Utility, EigBounds) {
  std::mt19937_64 rng(7);
  for (int n = 0; n < 1000; ++n) {
    const auto inst = random_instance(rng);
    const double got = expected_information_gain(to_matrix(inst.likelihood), to_vector(inst.prior));
    const double bound = std::min(brute_entropy(inst.prior), std::log2(static_cast<double>(inst.likelihood[0].size())));
    EXPECT_GE(got, 0.0);
    EXPECT_LE(got, bound + 1e-9);
  }
}

TEST(Utility, ExpectedKlMatchesBruteForce) {
  std::mt19937_64 rng(99);
  for (int n = 0; n < 1000; ++n) {
    const auto inst = random_instance(rng);
    const double got = expected_kl(to_matrix(inst.likelihood), to_vector(inst.prior));
    EXPECT_NEAR(got, brute_expected_kl(inst.likelihood, inst.prior), 1e-9) << "instance " << n;
  }
}

TEST(Utility, IdenticalRowsCarryNoInformation) {
  Eigen::MatrixXd lik(3, 2);
  lik << 0.3, 0.7, 0.3, 0.7, 0.3, 0.7;
  const Eigen::Vector3d prior(0.2, 0.5, 0.3);
  EXPECT_NEAR(expected_information_gain(lik, prior), 0.0, 1e-12);
  EXPECT_NEAR(expected_kl(lik, prior), 0.0, 1e-12);
}

TEST(Utility, DeterministicSplitOfUniformPairIsOneBit) {
  const Eigen::Matrix2d lik = Eigen::Matrix2d::Identity();
  const Eigen::Vector2d prior(0.5, 0.5);
  EXPECT_NEAR(expected_information_gain(lik, prior), 1.0, 1e-12);
  EXPECT_NEAR(expected_kl(lik, prior), 1.0, 1e-12);
}

TEST(Utility, PointMassPriorGainsNothing) {
  Eigen::MatrixXd lik(2, 2);
  lik << 0.9, 0.1, 0.2, 0.8;
  EXPECT_NEAR(expected_information_gain(lik, Eigen::Vector2d(1.0, 0.0)), 0.0, 1e-12);
}

TEST(SimilarityTable, RowsAreDistributionsAndDuplicatesShareOutcomes) {
  LexicalEmbedder emb;
  const std::vector<std::string> refs = {"dragon", "robot", "dragon"};
  Eigen::MatrixXd vecs(3, emb.dim());
  for (int i = 0; i < 3; ++i) vecs.row(i) = emb.embed(refs[static_cast<std::size_t>(i)]).transpose();
  const auto t = make_similarity_table("q", {0, 1, 2}, refs, vecs);
  ASSERT_EQ(t.num_answers(), 2u);
  EXPECT_EQ(t.answer_support[0], "dragon");
  EXPECT_EQ(t.reference_outcome, (std::vector<std::size_t>{0, 1, 0}));
  for (Eigen::Index i = 0; i < 3; ++i) EXPECT_NEAR(t.probs.row(i).sum(), 1.0, 1e-12);
  EXPECT_EQ(t.probs.row(0), t.probs.row(2));
  // orthogonal answers: own outcome takes almost all mass
  EXPECT_NEAR(t.probs(0, 0), (1.0 + 1e-9) / (1.0 + 2e-9), 1e-15);
}

TEST(SimilarityTable, EmptyAnswersSelfMatch) {
  const Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(2, 8);
  const auto t = make_similarity_table("q", {0, 1}, {"", "?"}, zeros);
  ASSERT_EQ(t.num_answers(), 2u);
  EXPECT_GT(t.probs(0, 0), 0.99);
  EXPECT_GT(t.probs(1, 1), 0.99);
}

TEST(SimilarityTable, RejectsMismatchedInputs) {
  EXPECT_THROW(make_similarity_table("q", {0, 1}, {"a"}, Eigen::MatrixXd::Zero(2, 4)), ValidationError);
  EXPECT_THROW(make_similarity_table("q", {}, {}, Eigen::MatrixXd::Zero(0, 4)), ValidationError);
}

TEST(SimilarityTable, TableUtilitiesUseRestrictedBelief) {
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 8);
  const auto t = make_similarity_table("q", {2, 0}, {"a", "b"}, eye);
  Eigen::VectorXd p(3);
  p << 0.25, 0.5, 0.25;
  const BeliefDistribution belief(p);
  const Eigen::Vector2d restricted(0.5, 0.5);
  EXPECT_NEAR(eig(t, belief), expected_information_gain(t.probs, restricted), 1e-15);
  EXPECT_NEAR(kl_utility(t, belief), expected_kl(t.probs, restricted), 1e-15);
  EXPECT_NEAR(eig(t, belief), kl_utility(t, belief), 1e-12);
}

TEST(SimilarityTable, MeanCosineVariantIsZeroWhenCandidatesAgree) {
  const Eigen::MatrixXd same = Eigen::MatrixXd::Ones(3, 4);
  const auto t = make_similarity_table("q", {0, 1, 2}, {"x", "x", "x"}, same);
  EXPECT_NEAR(kl_utility_mean_cosine(t, BeliefDistribution::uniform(3)), 0.0, 1e-12);
  Eigen::Vector3d skew(0.8, 0.1, 0.1);
  EXPECT_GT(kl_utility_mean_cosine(t, BeliefDistribution(skew)), 0.0);
}

TEST(TopK, ZeroMeansEverythingAndTiesKeepOrder) {
  Eigen::VectorXd p(4);
  p << 0.1, 0.4, 0.1, 0.4;
  const BeliefDistribution b(p);
  EXPECT_EQ(top_k_positions(b, 0), (std::vector<std::size_t>{1, 3, 0, 2}));
  EXPECT_EQ(top_k_positions(b, 2), (std::vector<std::size_t>{1, 3}));
}

TEST(Selector, RandomIsSeededAndUniformIsh) {
  const auto pool = make_pool({"a one?", "b two?", "c three?", "d four?"}, 2);
  const auto belief = BeliefDistribution::uniform(3);
  const SelectionContext ctx;
  EXPECT_EQ(select_question(SelectorKind::random, pool, belief, ctx, 5).question,
            select_question(SelectorKind::random, pool, belief, ctx, 5).question);
  std::vector<int> counts(4, 0);
  for (std::uint64_t s = 0; s < 4000; ++s) ++counts[select_question(SelectorKind::random, pool, belief, ctx, s).index];
  for (int c : counts) EXPECT_NEAR(c, 1000, 150);
}

TEST(Selector, EmptyPoolAndMissingDependenciesAreErrors) {
  const auto belief = BeliefDistribution::uniform(2);
  EXPECT_THROW(select_question(SelectorKind::random, CandidatePool{}, belief, {}, 0), ValidationError);
  const auto pool = make_pool({"what is it?"}, 2);
  EXPECT_THROW(select_question(SelectorKind::eig, pool, belief, {}, 0), ValidationError);
  EXPECT_THROW(select_question(SelectorKind::external, pool, belief, {}, 0), ValidationError);
}

TEST(Selector, EigPrefersTheSplittingQuestionAndFirstWinsTies) {
  World w(1);
  const auto& engine = *w.engine;
  const auto belief = BeliefDistribution::uniform(engine.corpus().size());
  const auto pool = make_pool({"Who is the author of the book?", "What is the setting of the book?",
                               "What is the era of the book?"},
                              2);
  const InteractionHistory history{"x", {}};
  for (auto kind : {SelectorKind::eig, SelectorKind::kl}) {
    const auto s = select_question(kind, pool, belief, engine.selection_context(history, {}), 0);
    EXPECT_EQ(s.index, 1u);
    ASSERT_EQ(s.scores.size(), 3u);
    EXPECT_NEAR(s.scores[0], 0.0, 1e-9);
    EXPECT_NEAR(s.scores[1], s.scores[2], 1e-12);
    EXPECT_GT(s.scores[1], 0.99);
    EXPECT_LE(s.scores[1], 1.0 + 1e-9);
  }
}

TEST(LikelihoodModel, ObservedSupportAnswerReproducesColumn) {
  World w(1);
  const auto& model = w.engine->likelihood();
  const auto belief = BeliefDistribution::uniform(w.engine->corpus().size());
  const auto table = model.build("What is the creature of the book?", belief);
  ASSERT_EQ(table.num_answers(), 2u);
  const auto col = model.observed_likelihood(table, table.answer_support[1]);
  EXPECT_EQ(col, Eigen::VectorXd(table.probs.col(1)));
  const auto unseen = model.observed_likelihood(table, "a dragon, I think");
  for (Eigen::Index i = 0; i < unseen.size(); ++i) EXPECT_GT(unseen(i), 0.0);
}
