#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "lfg/error.hpp"
#include "lfg/factorization.hpp"
#include "support/gradient_check.hpp"
#include "support/synthetic.hpp"

namespace lfg {
namespace {

TEST(Predict, ZeroModelReturnsGlobalMean) {
  FactorModel m(2, 2, 3);
  m.global_mean = 3.2;
  EXPECT_DOUBLE_EQ(predict(m, 0, 1), 3.2);
}

TEST(Predict, DotProduct) {
  FactorModel m(1, 1, 2);
  m.user_factors.row(0) << 1, 0;
  m.item_factors.row(0) << 0.5, 2;
  EXPECT_DOUBLE_EQ(predict(m, 0, 0), 0.5);
}

TEST(Predict, UnknownFallbacks) {
  FactorModel m(1, 1, 1);
  m.global_mean = 3.0;
  m.item_bias(0) = 0.3;
  m.user_bias(0) = -0.5;
  m.user_factors(0, 0) = 2;
  m.item_factors(0, 0) = 2;
  EXPECT_DOUBLE_EQ(predict(m, std::nullopt, 0), 3.3);
  EXPECT_DOUBLE_EQ(predict(m, 0, std::nullopt), 2.5);
  EXPECT_DOUBLE_EQ(predict(m, std::nullopt, std::nullopt), 3.0);
  EXPECT_DOUBLE_EQ(predict(m, 5, 0), 3.3);  // out of range counts as unknown
  m.users.intern(77);
  m.items.intern(88);
  EXPECT_DOUBLE_EQ(predict_external(m, 1, 88), 3.3);
  EXPECT_DOUBLE_EQ(predict_external(m, 77, 88), 3.0 - 0.5 + 0.3 + 4.0);
}

TEST(Train, ConstantRatingsGiveConstantPredictions) {
  RatingDataset ds;
  for (int u = 0; u < 20; ++u)
    for (int i = 0; i < 15; ++i)
      if ((u + i) % 3 != 0) ds.triples.push_back({ds.users.intern(u), ds.items.intern(i), 3.0, 0});
  ds.recount();
  auto m = train(ds, TrainingConfig{});
  EXPECT_DOUBLE_EQ(m.global_mean, 3.0);
  auto metrics = evaluate(m, ds);
  EXPECT_LT(metrics.rmse, 1e-3);
  EXPECT_NEAR(predict(m, 0, 0), 3.0, 1e-2);
}

TEST(Train, RecoversPlantedRankTwoModel) {
  auto ds = testing::planted_dataset(60, 50, 2, 0.6, 3.5, 11);
  auto [train_set, test_set] = split_dataset(ds, 0.2, 3);
  auto m = train(train_set, testing::planted_config());
  EXPECT_LT(evaluate(m, train_set).rmse, 0.05);
  EXPECT_LT(evaluate(m, test_set).rmse, 0.1);
}

TEST(Train, DeterministicUnderSeed) {
  auto ds = testing::planted_dataset(30, 20, 3, 0.5, 3.0, 2, 0.3);
  TrainingConfig cfg;
  cfg.factor_count = 4;
  auto a = train(ds, cfg);
  auto b = train(ds, cfg);
  EXPECT_TRUE(a == b);
  cfg.seed += 1;
  EXPECT_FALSE(a == train(ds, cfg));
}

TEST(Train, ObjectiveNonIncreasingAcrossEpochs) {
  auto ds = testing::planted_dataset(80, 60, 3, 0.3, 3.5, 9, 0.4);
  TrainingConfig cfg;  // defaults: k=10, λ=0.001, 16 epochs
  std::vector<double> objective;
  train<double>(ds, cfg, [&](int, const FactorModel& m) { objective.push_back(training_objective(m, ds, cfg.reg_lambda)); });
  ASSERT_EQ(objective.size(), 16u);
  for (std::size_t e = 1; e < objective.size(); ++e)
    EXPECT_LE(objective[e], objective[e - 1] * 1.01) << "epoch " << e + 1;
  EXPECT_LT(objective.back(), objective.front());
}

TEST(Train, DivergenceIsReported) {
  auto ds = testing::planted_dataset(20, 20, 2, 0.8, 3.0, 4);
  for (auto& t : ds.triples) t.rating *= 1e3;
  TrainingConfig cfg;
  cfg.learning_rate = 50.0;
  try {
    train(ds, cfg);
    FAIL() << "expected divergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "training_diverged");
    EXPECT_NE(std::string(e.what()).find("learning_rate"), std::string::npos);
  }
}

TEST(Train, RejectsInvalidConfigAndEmptyData) {
  RatingDataset empty;
  EXPECT_THROW(train(empty, TrainingConfig{}), Error);
  auto ds = testing::planted_dataset(5, 5, 1, 1.0, 3.0, 1);
  TrainingConfig cfg;
  cfg.factor_count = 0;
  EXPECT_THROW(train(ds, cfg), Error);
  cfg = {};
  cfg.learning_rate = 0;
  EXPECT_THROW(train(ds, cfg), Error);
  cfg = {};
  cfg.reg_lambda = -1;
  EXPECT_THROW(train(ds, cfg), Error);
}

TEST(GradientCheck, SgdDirectionMatchesCentralDifferences) { EXPECT_LT(testing::worst_gradient_error(), 1e-4); }

TEST(GradientCheck, StepUsesPreUpdateFactors) {
  FactorModel m(1, 1, 1);
  m.user_factors(0, 0) = 1.0;
  m.item_factors(0, 0) = 2.0;
  // e = 5 − 2 = 3; p ← 1 + 0.1·3·2 = 1.6; q ← 2 + 0.1·3·1 = 2.3 (not 3·1.6)
  apply_sgd_step(m, 0, 0, 5.0, 0.0, 0.1);
  EXPECT_DOUBLE_EQ(m.user_factors(0, 0), 1.6);
  EXPECT_DOUBLE_EQ(m.item_factors(0, 0), 2.3);
  EXPECT_DOUBLE_EQ(m.user_bias(0), 0.3);
  EXPECT_DOUBLE_EQ(m.item_bias(0), 0.3);
}

TEST(Evaluate, PerfectPredictor) {
  auto ds = testing::planted_dataset(10, 10, 2, 0.7, 3.0, 8);
  std::map<std::pair<int, int>, double> truth;
  for (auto& t : ds.triples) truth[{t.user, t.item}] = t.rating;
  auto metrics = evaluate_with(ds, [&](int u, int i) { return truth.at({u, i}); });
  EXPECT_DOUBLE_EQ(metrics.rmse, 0.0);
  ASSERT_TRUE(metrics.ndcg_at_10.has_value());
  EXPECT_NEAR(*metrics.ndcg_at_10, 1.0, 1e-12);
}

// Brute force over all orderings of three items with the textbook formula.
double brute_dcg(const std::vector<double>& gains_in_rank_order) {
  double s = 0.0;
  for (std::size_t r = 0; r < gains_in_rank_order.size(); ++r) s += gains_in_rank_order[r] / std::log2(r + 2.0);
  return s;
}

TEST(Evaluate, NdcgReversedOrderMatchesBruteForce) {
  const std::vector<double> ratings = {5, 3, 1};
  std::vector<double> perm = ratings;
  std::sort(perm.begin(), perm.end());
  double ideal = 0.0, worst = 1e9;
  do {
    ideal = std::max(ideal, brute_dcg(perm));
    worst = std::min(worst, brute_dcg(perm));
  } while (std::next_permutation(perm.begin(), perm.end()));
  const double reversed = brute_dcg({1, 3, 5}) / ideal;
  EXPECT_DOUBLE_EQ(worst / ideal, reversed);
  EXPECT_NEAR(reversed, 0.7294661149577071, 1e-15);

  RatingDataset ds;
  for (int i = 0; i < 3; ++i) ds.triples.push_back({ds.users.intern(1), ds.items.intern(i), ratings[i], 0});
  ds.recount();
  // Predicted scores rank the 1-rated item first and the 5-rated item last.
  auto metrics = evaluate_with(ds, [&](int, int i) { return static_cast<double>(i); });
  ASSERT_TRUE(metrics.ndcg_at_10.has_value());
  EXPECT_NEAR(*metrics.ndcg_at_10, reversed, 1e-12);
}

TEST(Evaluate, ConstantPredictorOnConstantData) {
  RatingDataset ds;
  for (int u = 0; u < 4; ++u) ds.triples.push_back({ds.users.intern(u), ds.items.intern(u % 2), 4.0, 0});
  ds.recount();
  auto metrics = evaluate_with(ds, [](int, int) { return 4.0; });
  EXPECT_DOUBLE_EQ(metrics.rmse, 0.0);
  EXPECT_FALSE(metrics.ndcg_at_10.has_value()) << "no user has two test ratings";
}

TEST(Evaluate, CutoffLimitsRanking) {
  // Ranks 11 and 12 must not contribute.
  std::vector<double> actual(12, 1.0), pred(12);
  actual[11] = 5.0;
  std::iota(pred.begin(), pred.end(), 0.0);
  std::reverse(pred.begin(), pred.end());
  EXPECT_LT(ndcg_at(actual, pred, 10), 1.0);
  EXPECT_DOUBLE_EQ(ndcg_at(actual, pred, 12), brute_dcg({1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 5}) /
                                                  brute_dcg({5, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1}));
}

TEST(Train, FloatScalarInstantiates) {
  auto ds = testing::planted_dataset(10, 10, 2, 0.8, 3.0, 1);
  auto m = train<float>(ds, TrainingConfig{});
  EXPECT_TRUE(m.all_finite());
  EXPECT_GT(evaluate(m, ds).rmse, 0.0);
}

}  // namespace
}  // namespace lfg
