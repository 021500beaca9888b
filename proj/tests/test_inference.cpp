#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "btcost/inference.hpp"
#include "btcost/simulation.hpp"

namespace btcost {
namespace {

ComparisonDataset two_feature(double wins_f, double wins_g) {
  std::vector<PairwiseComparison> recs;
  if (wins_f > 0) recs.push_back({0, 1, wins_f});
  if (wins_g > 0) recs.push_back({1, 0, wins_g});
  return ComparisonDataset(make_catalog({"f", "g"}), recs);
}

EstimatorConfig unregularized() {
  EstimatorConfig c;
  c.pseudo_count = 0.0;
  c.tolerance = 1e-12;
  return c;
}

TEST(EstimatorConfig, Validation) {
  EstimatorConfig c;
  c.tolerance = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.max_iterations = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.pseudo_count = -1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

// Two features: the MLE satisfies logistic(bf - bg) = W_fg / N_fg, so the
// difference is ln(W_fg / W_gf).
TEST(MapEstimate, TwoFeatureClosedForm) {
  const auto fit = map_estimate(two_feature(3, 1), unregularized());
  ASSERT_TRUE(fit.converged);
  EXPECT_NEAR(fit.strengths[0] - fit.strengths[1], std::log(3.0), 1e-6);
  EXPECT_NEAR(fit.strengths[0], 0.5493061443340549, 1e-6);
  EXPECT_NEAR(fit.strengths[1], -0.5493061443340549, 1e-6);
}

TEST(MapEstimate, TwoFeatureOracleProperty) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.01, 50.0);
  for (int i = 0; i < 200; ++i) {
    const double a = u(gen), b = u(gen);
    const auto fit = map_estimate(two_feature(a, b), unregularized());
    EXPECT_NEAR(fit.strengths[0] - fit.strengths[1], std::log(a / b), 1e-6);
  }
}

TEST(MapEstimate, SymmetricDataGivesZero) {
  auto cat = make_catalog({"a", "b", "c", "d"});
  std::vector<PairwiseComparison> recs;
  for (Index f = 0; f < 4; ++f)
    for (Index g = 0; g < 4; ++g)
      if (f != g) recs.push_back({f, g, 2.0});
  const auto fit = map_estimate(ComparisonDataset(cat, recs), unregularized());
  EXPECT_TRUE(fit.converged);
  EXPECT_LT(fit.strengths.values().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MapEstimate, PriorOnlyIsFlat) {
  const auto fit = map_estimate(ComparisonDataset(make_catalog({"a", "b", "c"})));
  EXPECT_TRUE(fit.converged);
  EXPECT_TRUE(fit.strengths.values().isZero(0.0));
}

TEST(MapEstimate, NonIdentifiableWithoutPseudoCount) {
  auto cat = make_catalog({"a", "b", "c"});
  // a always beats b; c never compared.
  const ComparisonDataset data(cat, {{0, 1}, {0, 1}});
  EXPECT_THROW(map_estimate(data, unregularized()), NonIdentifiableError);
  // A pseudo-count makes it well posed.
  const auto fit = map_estimate(data);
  EXPECT_TRUE(fit.converged);
  EXPECT_GT(fit.strengths[0], fit.strengths[1]);

  // Connected but one feature never wins: still no finite MLE.
  const ComparisonDataset chain(cat, {{0, 1}, {1, 0}, {0, 2}, {1, 2}});
  EXPECT_THROW(map_estimate(chain, unregularized()), NonIdentifiableError);

  EXPECT_THROW(map_estimate(ComparisonDataset(cat), unregularized()), InvalidArgument);
}

TEST(MapEstimate, NonConvergenceIsReported) {
  const StrengthVector truth = draw_true_strengths(6, 4);
  const auto data = simulate_pairwise_survey(truth, 600, 5);
  EstimatorConfig c;
  c.max_iterations = 2;
  const auto fit = map_estimate(data, c);
  EXPECT_FALSE(fit.converged);
  EXPECT_EQ(fit.iterations, 2);
  EXPECT_GT(fit.final_delta, c.tolerance);
  EXPECT_NEAR(fit.strengths.values().mean(), 0.0, 1e-10);
}

TEST(MapEstimate, ResultInvariantsAndMonotoneObjective) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const StrengthVector truth = draw_true_strengths(8, seed);
    const auto data = simulate_pairwise_survey(truth, 400, seed + 100);
    EstimatorConfig c;
    c.trace_objective = true;
    const auto fit = map_estimate(data, c);
    EXPECT_NEAR(fit.strengths.values().mean(), 0.0, 1e-10);
    ASSERT_TRUE(fit.converged);
    EXPECT_LE(fit.final_delta, c.tolerance);
    ASSERT_EQ(fit.objective_trace.size(), static_cast<std::size_t>(fit.iterations) + 1);
    for (std::size_t i = 1; i < fit.objective_trace.size(); ++i)
      EXPECT_GE(fit.objective_trace[i], fit.objective_trace[i - 1] - 1e-9) << "iteration " << i;
    EXPECT_DOUBLE_EQ(fit.log_posterior, log_posterior(data, fit.strengths.values(), 0.1));
  }
}

// The fit is the maximizer: small perturbations never increase the objective.
TEST(MapEstimate, IsLocalMaximum) {
  const StrengthVector truth = draw_true_strengths(5, 21);
  const auto data = simulate_pairwise_survey(truth, 300, 22);
  EstimatorConfig c;
  c.tolerance = 1e-12;
  const auto fit = map_estimate(data, c);
  const double best = log_posterior(data, fit.strengths.values(), c.pseudo_count);
  std::mt19937_64 gen(1);
  std::normal_distribution<double> z(0.0, 1e-3);
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd p = fit.strengths.values();
    for (auto& x : p) x += z(gen);
    EXPECT_LE(log_posterior(data, p, c.pseudo_count), best + 1e-9);
  }
}

TEST(MapEstimate, OrderInvariance) {
  const StrengthVector truth = draw_true_strengths(7, 30);
  const auto data = simulate_pairwise_survey(truth, 700, 31);
  auto recs = data.records();
  std::shuffle(recs.begin(), recs.end(), std::mt19937_64(2));
  const auto a = map_estimate(data);
  const auto b = map_estimate(ComparisonDataset(data.catalog_ptr(), recs));
  EXPECT_LT((a.strengths.values() - b.strengths.values()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(MapEstimate, WeightLinearity) {
  const StrengthVector truth = draw_true_strengths(6, 40);
  const auto data = simulate_pairwise_survey(truth, 500, 41);
  std::vector<PairwiseComparison> halves;
  for (auto r : data.records()) {
    r.weight *= 0.5;
    halves.push_back(r);
    halves.push_back(r);
  }
  const auto a = map_estimate(data);
  const auto b = map_estimate(ComparisonDataset(data.catalog_ptr(), halves));
  EXPECT_LT((a.strengths.values() - b.strengths.values()).cwiseAbs().maxCoeff(), 1e-10);
}

// Shifting the generating strengths leaves every label unchanged (only
// differences enter), so the zero-mean fit is identical.
TEST(MapEstimate, GaugeInvarianceOfFit) {
  const StrengthVector truth = draw_true_strengths(6, 50);
  const StrengthVector shifted(truth.catalog_ptr(), truth.values().array() + 3.0);
  const auto d1 = simulate_pairwise_survey(truth, 800, 51);
  const auto d2 = simulate_pairwise_survey(shifted, 800, 51);
  ASSERT_EQ(d1.records(), d2.records());
  EXPECT_EQ(map_estimate(d1).strengths, map_estimate(d2).strengths);
  EXPECT_NEAR(centered_mse(map_estimate(d2).strengths, shifted),
              centered_mse(map_estimate(d1).strengths, truth), 1e-15);
}

TEST(MapEstimate, RoundTripRecovery) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const StrengthVector truth = draw_true_strengths(10, seed);
    const auto data = simulate_pairwise_survey(truth, 500 * 10, seed + 7);
    EXPECT_LT(centered_mse(map_estimate(data).strengths, truth), 0.02);
  }
}

TEST(MapEstimate, ConsistencyAcrossDataSizes) {
  int monotone = 0;
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    const StrengthVector truth = draw_true_strengths(5, 1000 + trial);
    double prev = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (std::size_t per_feature : {100, 1000, 10000}) {
      const auto data = simulate_pairwise_survey(truth, per_feature * 5, 2000 + trial);
      const double mse = centered_mse(map_estimate(data).strengths, truth);
      ok = ok && mse <= prev;
      prev = mse;
    }
    monotone += ok ? 1 : 0;
  }
  EXPECT_GE(monotone, 9);
}

TEST(ExpandRecourse, Examples) {
  auto cat = make_catalog({"a", "b", "c", "d", "x"});
  const std::vector<RecourseComparison> recs{
      {Recourse::from_names(*cat, {"a", "b"}), Recourse::from_names(*cat, {"c", "d"})},
      {Recourse::from_names(*cat, {"a"}), Recourse::from_names(*cat, {"b"})},
      {Recourse::from_names(*cat, {"a", "x"}), Recourse::from_names(*cat, {"b", "x"})},
  };
  const auto out = expand_recourse_comparisons(recs, cat);
  EXPECT_EQ(out.skipped, 0u);
  const std::vector<PairwiseComparison> expected{
      {0, 2, 0.25}, {0, 3, 0.25}, {1, 2, 0.25}, {1, 3, 0.25},  // {a,b} > {c,d}
      {0, 1, 1.0},                                             // {a} > {b}
      {0, 1, 0.25},                                            // {a,x} > {b,x}
  };
  EXPECT_EQ(out.dataset.records(), expected);
}

TEST(ExpandRecourse, SkipsNestedSets) {
  auto cat = make_catalog({"a", "b", "c"});
  const std::vector<RecourseComparison> recs{
      {Recourse::from_names(*cat, {"a", "b"}), Recourse::from_names(*cat, {"a"})},
      {Recourse::from_names(*cat, {"c"}), Recourse::from_names(*cat, {"a"})},
  };
  const auto out = expand_recourse_comparisons(recs, cat);
  EXPECT_EQ(out.skipped, 1u);
  EXPECT_EQ(out.dataset.records(), (std::vector<PairwiseComparison>{{2, 0, 1.0}}));
}

TEST(ExpandRecourse, SingletonsMatchPairwiseFit) {
  const StrengthVector truth = draw_true_strengths(6, 60);
  const auto pairwise = simulate_pairwise_survey(truth, 300, 61);
  std::vector<RecourseComparison> recs;
  for (const auto& r : pairwise.records())
    recs.emplace_back(Recourse(truth.catalog(), {r.winner}), Recourse(truth.catalog(), {r.loser}));
  const auto expanded = expand_recourse_comparisons(recs, truth.catalog_ptr());
  EXPECT_EQ(expanded.dataset.records(), pairwise.records());
}

}  // namespace
}  // namespace btcost
