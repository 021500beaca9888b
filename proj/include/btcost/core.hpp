#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "btcost/errors.hpp"

namespace btcost {

using Index = std::size_t;

// ---------------------------------------------------------------------------
// Feature catalog
// ---------------------------------------------------------------------------

/// Ordered, immutable set of feature names. Positions are the indices used by
/// every other type in the library.
class FeatureCatalog {
 public:
  explicit FeatureCatalog(std::vector<std::string> names);
  FeatureCatalog(std::initializer_list<std::string> names)
      : FeatureCatalog(std::vector<std::string>(names)) {}

  /// Catalog `f1 .. fn`.
  static FeatureCatalog numbered(std::size_t n);

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(Index i) const { return names_.at(i); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  std::optional<Index> find(std::string_view name) const;
  /// Throws InvalidArgument for unknown names.
  Index index_of(std::string_view name) const;

  friend bool operator==(const FeatureCatalog& a, const FeatureCatalog& b) {
    return a.names_ == b.names_;
  }

  /// Names may not be empty or contain these characters.
  static bool valid_name(std::string_view name) noexcept;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Index> index_;
};

using CatalogPtr = std::shared_ptr<const FeatureCatalog>;

inline CatalogPtr make_catalog(std::vector<std::string> names) {
  return std::make_shared<const FeatureCatalog>(std::move(names));
}

// ---------------------------------------------------------------------------
// Per-feature vectors
// ---------------------------------------------------------------------------

struct StrengthTag {};
struct CostTag {};

/// One finite value per catalog feature. `Tag` keeps strengths (beta) and
/// costs (-beta) from being mixed up.
template <typename Scalar, typename Tag>
class BasicFeatureVector {
 public:
  using scalar_type = Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  BasicFeatureVector(CatalogPtr catalog, Vector values)
      : catalog_(std::move(catalog)), values_(std::move(values)) {
    if (!catalog_) throw InvalidArgument("feature vector requires a catalog");
    if (static_cast<std::size_t>(values_.size()) != catalog_->size())
      throw InvalidArgument("feature vector length " + std::to_string(values_.size()) +
                            " does not match catalog size " +
                            std::to_string(catalog_->size()));
    if (!values_.allFinite()) throw InvalidArgument("feature vector entries must be finite");
  }

  /// All-zero vector over `catalog`.
  static BasicFeatureVector zeros(CatalogPtr catalog) {
    const auto n = static_cast<Eigen::Index>(catalog->size());
    return BasicFeatureVector(std::move(catalog), Vector::Zero(n));
  }

  const FeatureCatalog& catalog() const noexcept { return *catalog_; }
  const CatalogPtr& catalog_ptr() const noexcept { return catalog_; }
  const Vector& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }

  Scalar operator[](Index i) const { return values_(static_cast<Eigen::Index>(i)); }
  Scalar at(std::string_view feature) const { return (*this)[catalog_->index_of(feature)]; }

  friend bool operator==(const BasicFeatureVector& a, const BasicFeatureVector& b) {
    return *a.catalog_ == *b.catalog_ && a.values_ == b.values_;
  }

 private:
  CatalogPtr catalog_;
  Vector values_;
};

template <typename Scalar>
using BasicStrengthVector = BasicFeatureVector<Scalar, StrengthTag>;
template <typename Scalar>
using BasicCostVector = BasicFeatureVector<Scalar, CostTag>;

using StrengthVector = BasicStrengthVector<double>;
using CostVector = BasicCostVector<double>;

template <typename Scalar>
BasicCostVector<Scalar> costs_from_strengths(const BasicStrengthVector<Scalar>& beta) {
  return BasicCostVector<Scalar>(beta.catalog_ptr(), -beta.values());
}

template <typename Scalar>
BasicStrengthVector<Scalar> strengths_from_costs(const BasicCostVector<Scalar>& costs) {
  return BasicStrengthVector<Scalar>(costs.catalog_ptr(), -costs.values());
}

/// Shift so the entries sum to zero.
template <typename Scalar>
BasicStrengthVector<Scalar> zero_mean(const BasicStrengthVector<Scalar>& beta) {
  return BasicStrengthVector<Scalar>(beta.catalog_ptr(),
                                     beta.values().array() - beta.values().mean());
}

// ---------------------------------------------------------------------------
// Recourses and survey records
// ---------------------------------------------------------------------------

/// Non-empty set of modified features, stored as sorted catalog indices.
class Recourse {
 public:
  Recourse(const FeatureCatalog& catalog, std::span<const Index> features);
  Recourse(const FeatureCatalog& catalog, std::initializer_list<Index> features)
      : Recourse(catalog, std::span<const Index>(features.begin(), features.size())) {}

  static Recourse from_names(const FeatureCatalog& catalog,
                             std::span<const std::string> names);
  static Recourse from_names(const FeatureCatalog& catalog,
                             std::initializer_list<std::string> names) {
    return from_names(catalog, std::span<const std::string>(names.begin(), names.size()));
  }

  const std::vector<Index>& features() const noexcept { return features_; }
  std::size_t size() const noexcept { return features_.size(); }
  bool contains(Index f) const {
    return std::binary_search(features_.begin(), features_.end(), f);
  }

  friend bool operator==(const Recourse&, const Recourse&) = default;

 private:
  std::vector<Index> features_;
};

/// "winner is easier to modify than loser", counted `weight` times.
struct PairwiseComparison {
  Index winner = 0;
  Index loser = 0;
  double weight = 1.0;

  friend bool operator==(const PairwiseComparison&, const PairwiseComparison&) = default;
};

/// "recourse `winner` is easier to carry out than recourse `loser`".
class RecourseComparison {
 public:
  RecourseComparison(Recourse winner, Recourse loser);

  const Recourse& winner() const noexcept { return winner_; }
  const Recourse& loser() const noexcept { return loser_; }

  friend bool operator==(const RecourseComparison&, const RecourseComparison&) = default;

 private:
  Recourse winner_;
  Recourse loser_;
};

/// Weighted pairwise survey over a catalog, with win tallies per ordered pair.
class ComparisonDataset {
 public:
  explicit ComparisonDataset(CatalogPtr catalog, std::vector<PairwiseComparison> records = {});

  const FeatureCatalog& catalog() const noexcept { return *catalog_; }
  const CatalogPtr& catalog_ptr() const noexcept { return catalog_; }
  const std::vector<PairwiseComparison>& records() const noexcept { return records_; }

  /// W(f, g): total weight of records where f beat g.
  const Eigen::MatrixXd& wins() const noexcept { return wins_; }
  double wins(Index f, Index g) const {
    return wins_(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(g));
  }
  /// N(f, g) = W(f, g) + W(g, f).
  double compared(Index f, Index g) const { return wins(f, g) + wins(g, f); }
  double total_weight() const noexcept { return total_weight_; }

 private:
  CatalogPtr catalog_;
  std::vector<PairwiseComparison> records_;
  Eigen::MatrixXd wins_;
  double total_weight_ = 0.0;
};

// ---------------------------------------------------------------------------
// Bradley-Terry probabilities
// ---------------------------------------------------------------------------

/// 1 / (1 + e^-x) without overflow for large |x|.
template <typename Scalar>
Scalar logistic(Scalar x) {
  using std::exp;
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-x));
  const Scalar e = exp(x);
  return e / (Scalar(1) + e);
}

/// Probability that a feature with strength `beta_f` is judged easier than one
/// with strength `beta_g`: e^bf / (e^bf + e^bg).
template <typename Scalar>
Scalar pairwise_prob(Scalar beta_f, Scalar beta_g) {
  using std::isfinite;
  if (!isfinite(beta_f) || !isfinite(beta_g))
    throw InvalidArgument("pairwise_prob: strengths must be finite");
  return logistic(beta_f - beta_g);
}

/// W(f, g) / N(f, g). Throws NoDataError when the pair was never compared.
double empirical_pair_prob(const ComparisonDataset& dataset, Index f, Index g);

/// Features only in `first` and only in `second`.
struct DifferenceSets {
  std::vector<Index> only_first;
  std::vector<Index> only_second;
};

/// Throws NotComparableError when either difference is empty.
DifferenceSets difference_sets(const Recourse& first, const Recourse& second);

/// Probability that `r1` is easier than `r2`: the mean of pairwise_prob over the
/// cross pairs (f, g), f in r1 \ r2, g in r2 \ r1. Shared features drop out.
template <typename Derived>
typename Derived::Scalar recourse_prob(const Recourse& r1, const Recourse& r2,
                                       const Eigen::MatrixBase<Derived>& beta) {
  using Scalar = typename Derived::Scalar;
  const DifferenceSets d = difference_sets(r1, r2);
  for (const auto* side : {&d.only_first, &d.only_second})
    for (Index f : *side)
      if (f >= static_cast<Index>(beta.size()))
        throw InvalidArgument("recourse_prob: feature index outside strength vector");

  Scalar sum(0);
  for (Index f : d.only_first)
    for (Index g : d.only_second)
      sum += pairwise_prob(beta(static_cast<Eigen::Index>(f)),
                           beta(static_cast<Eigen::Index>(g)));
  return sum / Scalar(d.only_first.size() * d.only_second.size());
}

template <typename Scalar>
Scalar recourse_prob(const Recourse& r1, const Recourse& r2,
                     const BasicStrengthVector<Scalar>& beta) {
  return recourse_prob(r1, r2, beta.values());
}

/// Monte Carlo estimate of recourse_prob from `samples` uniform cross pairs.
double recourse_prob_mc(const Recourse& r1, const Recourse& r2, const StrengthVector& beta,
                        std::uint64_t samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Recourse disambiguation
// ---------------------------------------------------------------------------

enum class Easier { first, second, tie };

struct MonteCarloSettings {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
};

struct RecourseOrdering {
  double rho_12 = 0.5;
  double rho_21 = 0.5;
  Easier easier = Easier::tie;
};

inline constexpr double kDefaultTieEpsilon = 1e-12;

/// Compares two recourses under `costs`. With `mc` set, rho_12 is the Monte
/// Carlo estimate and rho_21 = 1 - rho_12.
RecourseOrdering compare_recourses(const Recourse& r1, const Recourse& r2,
                                   const CostVector& costs,
                                   const std::optional<MonteCarloSettings>& mc = std::nullopt,
                                   double tie_epsilon = kDefaultTieEpsilon);

struct IdealityResult {
  bool ideal = true;
  std::optional<Recourse> witness;
  /// Positions in `alternatives` that were not comparable with the candidate.
  std::vector<std::size_t> skipped;
};

/// A recourse is ideal when no alternative beats it (rho(r > alt) < 0.5).
/// Returns the first such alternative as witness. Empty `alternatives` is
/// vacuously ideal.
IdealityResult is_ideal(const Recourse& r, std::span<const Recourse> alternatives,
                        const CostVector& costs);

}  // namespace btcost
