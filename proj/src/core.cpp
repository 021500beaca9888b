#include "btcost/core.hpp"

#include <iterator>

#include "btcost/random.hpp"

namespace btcost {

// ---------------------------------------------------------------------------
// FeatureCatalog

bool FeatureCatalog::valid_name(std::string_view name) noexcept {
  if (name.empty()) return false;
  return name.find_first_of(",;\n\r\"") == std::string_view::npos;
}

FeatureCatalog::FeatureCatalog(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() < 2) throw InvalidArgument("feature catalog needs at least 2 features");
  index_.reserve(names_.size());
  for (Index i = 0; i < names_.size(); ++i) {
    if (!valid_name(names_[i]))
      throw InvalidArgument("invalid feature name '" + names_[i] + "'");
    if (!index_.emplace(names_[i], i).second)
      throw InvalidArgument("duplicate feature name '" + names_[i] + "'");
  }
}

FeatureCatalog FeatureCatalog::numbered(std::size_t n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) names.push_back("f" + std::to_string(i));
  return FeatureCatalog(std::move(names));
}

std::optional<Index> FeatureCatalog::find(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Index FeatureCatalog::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw InvalidArgument("unknown feature '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Recourse and comparisons

Recourse::Recourse(const FeatureCatalog& catalog, std::span<const Index> features)
    : features_(features.begin(), features.end()) {
  if (features_.empty()) throw InvalidArgument("recourse must modify at least one feature");
  std::sort(features_.begin(), features_.end());
  if (std::adjacent_find(features_.begin(), features_.end()) != features_.end())
    throw InvalidArgument("recourse lists a feature twice");
  if (features_.back() >= catalog.size())
    throw InvalidArgument("recourse feature index outside catalog");
}

Recourse Recourse::from_names(const FeatureCatalog& catalog,
                              std::span<const std::string> names) {
  std::vector<Index> idx;
  idx.reserve(names.size());
  for (const auto& n : names) idx.push_back(catalog.index_of(n));
  return Recourse(catalog, idx);
}

RecourseComparison::RecourseComparison(Recourse winner, Recourse loser)
    : winner_(std::move(winner)), loser_(std::move(loser)) {
  if (winner_ == loser_) throw InvalidArgument("recourse comparison between identical sets");
}

ComparisonDataset::ComparisonDataset(CatalogPtr catalog, std::vector<PairwiseComparison> records)
    : catalog_(std::move(catalog)), records_(std::move(records)) {
  if (!catalog_) throw InvalidArgument("dataset requires a catalog");
  const auto n = static_cast<Eigen::Index>(catalog_->size());
  wins_ = Eigen::MatrixXd::Zero(n, n);
  for (const auto& r : records_) {
    if (r.winner >= catalog_->size() || r.loser >= catalog_->size())
      throw InvalidArgument("comparison references a feature outside the catalog");
    if (r.winner == r.loser) throw InvalidArgument("comparison of a feature with itself");
    if (!(r.weight > 0.0) || !std::isfinite(r.weight))
      throw InvalidArgument("comparison weight must be positive and finite");
    wins_(static_cast<Eigen::Index>(r.winner), static_cast<Eigen::Index>(r.loser)) += r.weight;
    total_weight_ += r.weight;
  }
}

// ---------------------------------------------------------------------------
// Probabilities

double empirical_pair_prob(const ComparisonDataset& dataset, Index f, Index g) {
  if (f >= dataset.catalog().size() || g >= dataset.catalog().size())
    throw InvalidArgument("empirical_pair_prob: feature outside catalog");
  if (f == g) throw InvalidArgument("empirical_pair_prob: f and g must differ");
  const double n = dataset.compared(f, g);
  if (n <= 0.0)
    throw NoDataError("no comparisons between '" + dataset.catalog().name(f) + "' and '" +
                      dataset.catalog().name(g) + "'");
  return dataset.wins(f, g) / n;
}

DifferenceSets difference_sets(const Recourse& first, const Recourse& second) {
  DifferenceSets d;
  const auto& a = first.features();
  const auto& b = second.features();
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(d.only_first));
  std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(d.only_second));
  if (d.only_first.empty() || d.only_second.empty())
    throw NotComparableError(
        "recourses are not comparable: one modifies a subset of the other's features");
  return d;
}

double recourse_prob_mc(const Recourse& r1, const Recourse& r2, const StrengthVector& beta,
                        std::uint64_t samples, std::uint64_t seed) {
  if (samples == 0) throw InvalidArgument("recourse_prob_mc: samples must be positive");
  const DifferenceSets d = difference_sets(r1, r2);
  for (const auto* side : {&d.only_first, &d.only_second})
    for (Index f : *side)
      if (f >= beta.size()) throw InvalidArgument("recourse feature outside strength vector");

  Rng rng(seed);
  double sum = 0.0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const Index f = d.only_first[rng.uniform_index(d.only_first.size())];
    const Index g = d.only_second[rng.uniform_index(d.only_second.size())];
    sum += pairwise_prob(beta[f], beta[g]);
  }
  return sum / static_cast<double>(samples);
}

// ---------------------------------------------------------------------------
// Disambiguation

RecourseOrdering compare_recourses(const Recourse& r1, const Recourse& r2,
                                   const CostVector& costs,
                                   const std::optional<MonteCarloSettings>& mc,
                                   double tie_epsilon) {
  const StrengthVector beta = strengths_from_costs(costs);
  RecourseOrdering out;
  if (mc) {
    out.rho_12 = recourse_prob_mc(r1, r2, beta, mc->samples, mc->seed);
    out.rho_21 = 1.0 - out.rho_12;
  } else {
    out.rho_12 = recourse_prob(r1, r2, beta);
    out.rho_21 = recourse_prob(r2, r1, beta);
  }
  if (std::abs(out.rho_12 - 0.5) < tie_epsilon)
    out.easier = Easier::tie;
  else
    out.easier = out.rho_12 > 0.5 ? Easier::first : Easier::second;
  return out;
}

IdealityResult is_ideal(const Recourse& r, std::span<const Recourse> alternatives,
                        const CostVector& costs) {
  const StrengthVector beta = strengths_from_costs(costs);
  IdealityResult result;
  for (std::size_t i = 0; i < alternatives.size(); ++i) {
    const Recourse& alt = alternatives[i];
    double forward = 0.0, backward = 0.0;
    try {
      forward = recourse_prob(r, alt, beta);
      backward = recourse_prob(alt, r, beta);
    } catch (const NotComparableError&) {
      result.skipped.push_back(i);
      continue;
    }
    if (forward < backward) {
      result.ideal = false;
      result.witness = alt;
      return result;
    }
  }
  return result;
}

}  // namespace btcost
