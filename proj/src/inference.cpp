#include "btcost/inference.hpp"

#include <cmath>
#include <string>

namespace btcost {

namespace {

// log(logistic(x)) without cancellation.
double log_logistic(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

std::vector<bool> reachable(const Eigen::MatrixXd& wins, bool forward) {
  const Eigen::Index n = wins.rows();
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<Eigen::Index> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const Eigen::Index u = stack.back();
    stack.pop_back();
    for (Eigen::Index v = 0; v < n; ++v) {
      const double w = forward ? wins(u, v) : wins(v, u);
      if (w > 0.0 && !seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = true;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

}  // namespace

void EstimatorConfig::validate() const {
  if (!(pseudo_count >= 0.0) || !std::isfinite(pseudo_count))
    throw InvalidArgument("pseudo_count must be a finite non-negative number");
  if (!(tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (max_iterations < 1) throw InvalidArgument("max_iterations must be at least 1");
}

double log_posterior(const ComparisonDataset& dataset, const Eigen::VectorXd& beta,
                     double pseudo_count) {
  if (static_cast<std::size_t>(beta.size()) != dataset.catalog().size())
    throw InvalidArgument("log_posterior: strength vector does not match catalog");
  double total = 0.0;
  for (const auto& r : dataset.records())
    total += r.weight * log_logistic(beta(static_cast<Eigen::Index>(r.winner)) -
                                     beta(static_cast<Eigen::Index>(r.loser)));
  if (pseudo_count > 0.0) {
    const Eigen::Index n = beta.size();
    for (Eigen::Index f = 0; f < n; ++f)
      for (Eigen::Index g = f + 1; g < n; ++g) {
        const double d = beta(f) - beta(g);
        total += 0.5 * pseudo_count * (log_logistic(d) + log_logistic(-d));
      }
  }
  return total;
}

bool win_graph_strongly_connected(const ComparisonDataset& dataset) {
  const auto& w = dataset.wins();
  const auto fwd = reachable(w, true);
  const auto bwd = reachable(w, false);
  for (std::size_t i = 0; i < fwd.size(); ++i)
    if (!fwd[i] || !bwd[i]) return false;
  return true;
}

EstimateResult map_estimate(const ComparisonDataset& dataset, const EstimatorConfig& config) {
  config.validate();
  const double lambda = config.pseudo_count;
  if (lambda == 0.0) {
    if (dataset.total_weight() <= 0.0)
      throw InvalidArgument("map_estimate: no data and no pseudo-count");
    if (!win_graph_strongly_connected(dataset))
      throw NonIdentifiableError(
          "comparison graph is not strongly connected; strengths are not identifiable "
          "without a positive pseudo-count");
  }

  const auto n = static_cast<Eigen::Index>(dataset.catalog().size());
  const Eigen::VectorXd numer =
      dataset.wins().rowwise().sum().array() + 0.5 * lambda * static_cast<double>(n - 1);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd denom(n);

  EstimateResult result{StrengthVector::zeros(dataset.catalog_ptr()), 0, false, 0.0, 0.0, {}};
  if (config.trace_objective)
    result.objective_trace.push_back(log_posterior(dataset, beta, lambda));

  for (int it = 1; it <= config.max_iterations; ++it) {
    denom.setZero();
    for (const auto& r : dataset.records()) {
      const auto i = static_cast<Eigen::Index>(r.winner);
      const auto j = static_cast<Eigen::Index>(r.loser);
      const double t = r.weight / (w(i) + w(j));
      denom(i) += t;
      denom(j) += t;
    }
    if (lambda > 0.0) {
      for (Eigen::Index f = 0; f < n; ++f)
        for (Eigen::Index g = f + 1; g < n; ++g) {
          const double t = lambda / (w(f) + w(g));
          denom(f) += t;
          denom(g) += t;
        }
    }

    Eigen::VectorXd next = (numer.array() / denom.array()).log();
    next.array() -= next.mean();
    const double delta = (next - beta).cwiseAbs().maxCoeff();
    beta = std::move(next);
    w = beta.array().exp();

    result.iterations = it;
    result.final_delta = delta;
    if (config.trace_objective)
      result.objective_trace.push_back(log_posterior(dataset, beta, lambda));
    if (delta <= config.tolerance) {
      result.converged = true;
      break;
    }
  }

  result.strengths = StrengthVector(dataset.catalog_ptr(), beta);
  result.log_posterior = config.trace_objective ? result.objective_trace.back()
                                                : log_posterior(dataset, beta, lambda);
  return result;
}

ExpandedSurvey expand_recourse_comparisons(std::span<const RecourseComparison> records,
                                           CatalogPtr catalog) {
  if (!catalog) throw InvalidArgument("expand_recourse_comparisons: missing catalog");
  std::vector<PairwiseComparison> pairs;
  std::size_t skipped = 0;
  for (const auto& rec : records) {
    for (const auto* side : {&rec.winner(), &rec.loser()})
      if (side->features().back() >= catalog->size())
        throw InvalidArgument("recourse comparison references a feature outside the catalog");
    DifferenceSets d;
    try {
      d = difference_sets(rec.winner(), rec.loser());
    } catch (const NotComparableError&) {
      ++skipped;
      continue;
    }
    const double weight =
        1.0 / static_cast<double>(rec.winner().size() * rec.loser().size());
    for (Index f : d.only_first)
      for (Index g : d.only_second) pairs.push_back({f, g, weight});
  }
  return {ComparisonDataset(std::move(catalog), std::move(pairs)), skipped};
}

}  // namespace btcost
