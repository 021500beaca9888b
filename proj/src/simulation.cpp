#include "btcost/simulation.hpp"

#include <chrono>
#include <string>

#include "btcost/random.hpp"

namespace btcost {

namespace {

void validate_schedule(const std::vector<std::size_t>& schedule) {
  if (schedule.empty()) throw InvalidArgument("comparison schedule is empty");
  if (schedule.front() == 0) throw InvalidArgument("schedule entries must be positive");
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (schedule[i] <= schedule[i - 1])
      throw InvalidArgument("comparison schedule must be strictly increasing");
}

std::uint64_t truth_seed(std::uint64_t trial_seed) { return derive_seed(trial_seed, 0); }

std::uint64_t survey_seed(std::uint64_t trial_seed, std::size_t total) {
  return derive_seed(trial_seed, static_cast<std::uint64_t>(total) + 1);
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

template <typename FitAt>
ExperimentReport run_experiment(std::size_t num_features, std::size_t recourse_size,
                                const std::vector<std::size_t>& schedule, std::size_t trials,
                                std::uint64_t seed, FitAt fit_at) {
  ExperimentReport report;
  report.rows.reserve(trials * schedule.size());
  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = derive_seed(seed, t);
    const StrengthVector truth = draw_true_strengths(num_features, truth_seed(trial_seed));
    for (std::size_t total : schedule) {
      ExperimentRow row;
      row.trial = t;
      row.num_features = num_features;
      row.recourse_size = recourse_size;
      row.total_comparisons = total;
      row.comparisons_per_feature =
          static_cast<double>(total) / static_cast<double>(num_features);
      const auto [estimate, runtime_ms] = fit_at(truth, total, survey_seed(trial_seed, total));
      row.mse = centered_mse(estimate.strengths, truth);
      row.runtime_ms = runtime_ms;
      row.converged = estimate.converged;
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace

StrengthVector draw_true_strengths(std::size_t num_features, std::uint64_t seed) {
  if (num_features < 2) throw InvalidArgument("need at least 2 features");
  auto catalog = std::make_shared<const FeatureCatalog>(FeatureCatalog::numbered(num_features));
  Rng rng(seed);
  Eigen::VectorXd values(static_cast<Eigen::Index>(num_features));
  for (Eigen::Index i = 0; i < values.size(); ++i) values(i) = rng.uniform01();
  return StrengthVector(std::move(catalog), std::move(values));
}

ComparisonDataset simulate_pairwise_survey(const StrengthVector& beta,
                                           std::size_t num_comparisons, std::uint64_t seed) {
  if (num_comparisons == 0) throw InvalidArgument("num_comparisons must be positive");
  Rng rng(seed);
  std::vector<PairwiseComparison> records;
  records.reserve(num_comparisons);
  for (std::size_t c = 0; c < num_comparisons; ++c) {
    const auto pair = sample_distinct(rng, beta.size(), 2);
    const Index f = pair[0], g = pair[1];
    if (rng.bernoulli(pairwise_prob(beta[f], beta[g])))
      records.push_back({f, g, 1.0});
    else
      records.push_back({g, f, 1.0});
  }
  return ComparisonDataset(beta.catalog_ptr(), std::move(records));
}

std::vector<RecourseComparison> simulate_recourse_survey(const StrengthVector& beta,
                                                         std::size_t recourse_size,
                                                         std::size_t num_comparisons,
                                                         std::uint64_t seed, LabelMode mode) {
  if (recourse_size == 0) throw InvalidArgument("recourse size must be at least 1");
  if (2 * recourse_size > beta.size())
    throw InvalidArgument("cannot draw two disjoint recourses of size " +
                          std::to_string(recourse_size) + " from " +
                          std::to_string(beta.size()) + " features");
  if (num_comparisons == 0) throw InvalidArgument("num_comparisons must be positive");

  const FeatureCatalog& catalog = beta.catalog();
  Rng rng(seed);
  std::vector<RecourseComparison> out;
  out.reserve(num_comparisons);
  for (std::size_t c = 0; c < num_comparisons; ++c) {
    const auto picks = sample_distinct(rng, beta.size(), 2 * recourse_size);
    const std::span<const Index> all(picks);
    Recourse r1(catalog, all.first(recourse_size));
    Recourse r2(catalog, all.last(recourse_size));
    const double rho = recourse_prob(r1, r2, beta);
    const bool first_wins = mode == LabelMode::bernoulli ? rng.bernoulli(rho) : rho >= 0.5;
    if (first_wins)
      out.emplace_back(std::move(r1), std::move(r2));
    else
      out.emplace_back(std::move(r2), std::move(r1));
  }
  return out;
}

double centered_mse(const StrengthVector& estimate, const StrengthVector& truth) {
  if (!(estimate.catalog() == truth.catalog()))
    throw InvalidArgument("centered_mse: vectors are over different catalogs");
  const Eigen::ArrayXd a = estimate.values().array() - estimate.values().mean();
  const Eigen::ArrayXd b = truth.values().array() - truth.values().mean();
  return (a - b).square().mean();
}

void PairwiseSimConfig::validate() const {
  if (num_features < 2) throw InvalidArgument("need at least 2 features");
  if (trials == 0) throw InvalidArgument("trials must be positive");
  validate_schedule(comparisons_schedule);
  estimator.validate();
}

void RecourseSimConfig::validate() const {
  if (num_features < 2) throw InvalidArgument("need at least 2 features");
  if (recourse_size == 0) throw InvalidArgument("recourse size must be at least 1");
  if (2 * recourse_size > num_features)
    throw InvalidArgument("recourse size too large for disjoint sampling");
  if (trials == 0) throw InvalidArgument("trials must be positive");
  validate_schedule(comparisons_schedule);
  estimator.validate();
}

ExperimentReport run_pairwise_experiment(const PairwiseSimConfig& config) {
  config.validate();
  return run_experiment(
      config.num_features, 1, config.comparisons_schedule, config.trials, config.seed,
      [&](const StrengthVector& truth, std::size_t total, std::uint64_t seed) {
        const ComparisonDataset data = simulate_pairwise_survey(truth, total, seed);
        const auto start = std::chrono::steady_clock::now();
        EstimateResult fit = map_estimate(data, config.estimator);
        return std::pair{std::move(fit), elapsed_ms(start)};
      });
}

ExperimentReport run_recourse_experiment(const RecourseSimConfig& config) {
  config.validate();
  return run_experiment(
      config.num_features, config.recourse_size, config.comparisons_schedule, config.trials,
      config.seed, [&](const StrengthVector& truth, std::size_t total, std::uint64_t seed) {
        const auto survey =
            simulate_recourse_survey(truth, config.recourse_size, total, seed, config.label_mode);
        const auto start = std::chrono::steady_clock::now();
        const ExpandedSurvey expanded = expand_recourse_comparisons(survey, truth.catalog_ptr());
        EstimateResult fit = map_estimate(expanded.dataset, config.estimator);
        return std::pair{std::move(fit), elapsed_ms(start)};
      });
}

}  // namespace btcost
