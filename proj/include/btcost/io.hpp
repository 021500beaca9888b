#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "btcost/core.hpp"
#include "btcost/simulation.hpp"

namespace btcost::io {

// File formats. CSV is the primary interchange; JSON mirrors each CSV row as
// an object in a top-level array.
//
//   pairwise    winner,loser,weight
//   recourse    winner_set,loser_set        features ';'-separated in a cell
//   vector      feature,value               strengths or costs
//   experiment  trial,num_features,recourse_size,total_comparisons,
//               comparisons_per_feature,mse,runtime_ms,converged
//
// Reals are written in shortest round-trip form. Readers reject unknown
// headers and malformed rows with a ParseError carrying the line number.

enum class Format { csv, json };

inline constexpr std::string_view kPairwiseHeader = "winner,loser,weight";
inline constexpr std::string_view kRecourseHeader = "winner_set,loser_set";
inline constexpr std::string_view kVectorHeader = "feature,value";
inline constexpr std::string_view kExperimentHeader =
    "trial,num_features,recourse_size,total_comparisons,comparisons_per_feature,mse,"
    "runtime_ms,converged";

Format parse_format(std::string_view name);

std::string format_double(double value);
double parse_double(std::string_view text, std::size_t line = 0);

std::string write_pairwise(const ComparisonDataset& dataset, Format format = Format::csv);
/// With `catalog` null, features are catalogued in order of first appearance.
ComparisonDataset read_pairwise(std::string_view content, Format format = Format::csv,
                                CatalogPtr catalog = nullptr);

struct RecourseSurvey {
  CatalogPtr catalog;
  std::vector<RecourseComparison> records;
};

std::string write_recourses(std::span<const RecourseComparison> records,
                            const FeatureCatalog& catalog, Format format = Format::csv);
RecourseSurvey read_recourses(std::string_view content, Format format = Format::csv,
                              CatalogPtr catalog = nullptr);

std::string write_strengths(const StrengthVector& beta, Format format = Format::csv);
std::string write_costs(const CostVector& costs, Format format = Format::csv);
/// The file's feature column defines the catalog.
StrengthVector read_strengths(std::string_view content, Format format = Format::csv);
CostVector read_costs(std::string_view content, Format format = Format::csv);

std::string write_experiment(const ExperimentReport& report, Format format = Format::csv);
ExperimentReport read_experiment(std::string_view content, Format format = Format::csv);

std::string read_file(const std::string& path);
/// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace btcost::io
