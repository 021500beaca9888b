#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "btcost/core.hpp"
#include "btcost/inference.hpp"

namespace btcost {

/// Strengths i.i.d. uniform on [0, 1) over the catalog `f1 .. fn`.
StrengthVector draw_true_strengths(std::size_t num_features, std::uint64_t seed);

/// `num_comparisons` records: a uniformly drawn pair of distinct features,
/// labelled by a Bernoulli draw at pairwise_prob. All weights are 1.
ComparisonDataset simulate_pairwise_survey(const StrengthVector& beta,
                                           std::size_t num_comparisons, std::uint64_t seed);

enum class LabelMode { bernoulli, deterministic };

/// `num_comparisons` records over two disjoint, uniformly drawn recourses of
/// `recourse_size` features. Bernoulli mode labels R1 the winner with
/// probability recourse_prob(R1, R2); deterministic mode when that is >= 0.5.
///
/// With recourse_size == 1 this consumes the generator exactly like
/// simulate_pairwise_survey, so both produce the same comparisons.
std::vector<RecourseComparison> simulate_recourse_survey(const StrengthVector& beta,
                                                         std::size_t recourse_size,
                                                         std::size_t num_comparisons,
                                                         std::uint64_t seed,
                                                         LabelMode mode = LabelMode::bernoulli);

/// Mean squared difference after centering each vector on its own mean.
double centered_mse(const StrengthVector& estimate, const StrengthVector& truth);

struct PairwiseSimConfig {
  std::size_t num_features = 5;
  std::vector<std::size_t> comparisons_schedule;  // totals, strictly increasing
  std::size_t trials = 10;
  std::uint64_t seed = 0;
  EstimatorConfig estimator;

  void validate() const;
};

struct RecourseSimConfig {
  std::size_t num_features = 20;
  std::size_t recourse_size = 2;
  std::vector<std::size_t> comparisons_schedule;
  std::size_t trials = 10;
  std::uint64_t seed = 0;
  LabelMode label_mode = LabelMode::bernoulli;
  EstimatorConfig estimator;

  void validate() const;
};

struct ExperimentRow {
  std::size_t trial = 0;
  std::size_t num_features = 0;
  std::size_t recourse_size = 1;
  std::size_t total_comparisons = 0;
  double comparisons_per_feature = 0.0;
  double mse = 0.0;
  double runtime_ms = 0.0;
  bool converged = false;

  friend bool operator==(const ExperimentRow&, const ExperimentRow&) = default;
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
};

/// Per trial: draw a truth, then for each schedule point simulate a fresh
/// survey, fit, and record the centered MSE and the fit's wall-clock time.
/// Rows come out in (trial, schedule) order.
///
/// Seeds: trial t uses derive_seed(seed, t); its truth uses substream 0 and the
/// survey for a point with N comparisons uses substream N + 1, so rows do not
/// depend on which other trials or points are run.
ExperimentReport run_pairwise_experiment(const PairwiseSimConfig& config);

/// As run_pairwise_experiment, but with recourse-level surveys expanded to
/// weighted pairwise data. Runtime covers expansion and fit.
ExperimentReport run_recourse_experiment(const RecourseSimConfig& config);

}  // namespace btcost
