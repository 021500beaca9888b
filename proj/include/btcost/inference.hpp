#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "btcost/core.hpp"

namespace btcost {

/// Knobs for map_estimate. `pseudo_count` adds that many virtual comparisons,
/// split evenly, between every unordered pair of features.
struct EstimatorConfig {
  double pseudo_count = 0.1;
  double tolerance = 1e-8;  // on max |delta beta| per iteration
  int max_iterations = 10000;
  /// Record the objective after every iteration in EstimateResult::objective_trace.
  bool trace_objective = false;

  void validate() const;
};

struct EstimateResult {
  StrengthVector strengths;  // zero-mean gauge
  int iterations = 0;
  bool converged = false;
  double final_delta = 0.0;
  double log_posterior = 0.0;
  std::vector<double> objective_trace;
};

/// Regularized Bradley-Terry log-likelihood of `beta` (log-strengths):
///   sum_records w log p(winner > loser) + sum_{f<g} (lambda/2) [log p_fg + log p_gf]
double log_posterior(const ComparisonDataset& dataset, const Eigen::VectorXd& beta,
                     double pseudo_count);

/// MAP strengths by minorization-maximization on the pseudo-count regularized
/// likelihood. Each iteration applies
///
///   w_f <- (sum_g W_fg + (n-1) lambda/2) / (sum_records touching f  weight / (w_f + w_other)
///                                           + sum_{g != f} lambda / (w_f + w_g))
///
/// to every w_f = exp(beta_f) at once, then recenters beta to zero mean. The
/// record sum is evaluated per record, so cost grows with survey size.
///
/// Throws NonIdentifiableError when pseudo_count == 0 and the directed win
/// graph is not strongly connected (the likelihood then has no finite
/// maximizer). Non-convergence is reported via `converged`, not thrown.
EstimateResult map_estimate(const ComparisonDataset& dataset, const EstimatorConfig& config = {});

/// True when every feature can reach every other along "beat" edges.
bool win_graph_strongly_connected(const ComparisonDataset& dataset);

struct ExpandedSurvey {
  ComparisonDataset dataset;
  std::size_t skipped = 0;  // records with no cross pairs
};

/// Turns each "R1 easier than R2" record into pairwise wins f > g for every
/// f in R1 \ R2, g in R2 \ R1, each weighted 1 / (|R1| |R2|).
ExpandedSurvey expand_recourse_comparisons(std::span<const RecourseComparison> records,
                                           CatalogPtr catalog);

}  // namespace btcost
