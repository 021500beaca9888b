#include "btcost/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include <json.hpp>

namespace btcost::io {

using nlohmann::json;

namespace {

struct Row {
  std::size_t line;
  std::vector<std::string_view> fields;
};

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

// Splits CSV content into rows below `header`. Blank lines are skipped; an
// empty document has no rows.
std::vector<Row> csv_rows(std::string_view content, std::string_view header) {
  std::vector<Row> rows;
  bool seen_header = false;
  std::size_t line_no = 0;
  for (std::string_view line : split(content, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!seen_header) {
      if (line != header)
        throw ParseError("unexpected header '" + std::string(line) + "', expected '" +
                             std::string(header) + "'",
                         line_no);
      seen_header = true;
      continue;
    }
    auto fields = split(line, ',');
    const std::size_t expected = split(header, ',').size();
    if (fields.size() != expected)
      throw ParseError("expected " + std::to_string(expected) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    rows.push_back({line_no, std::move(fields)});
  }
  return rows;
}

json parse_json_array(std::string_view content) {
  json doc;
  try {
    doc = json::parse(content);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), 0);
  }
  if (!doc.is_array()) throw ParseError("JSON document must be an array of rows", 0);
  return doc;
}

template <typename T>
T json_field(const json& row, const char* key, std::size_t index) {
  if (!row.is_object() || !row.contains(key))
    throw ParseError("row " + std::to_string(index + 1) + ": missing field '" + key + "'", 0);
  try {
    return row.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError("row " + std::to_string(index + 1) + ": field '" + key +
                         "' has the wrong type",
                     0);
  }
}

std::string checked_name(std::string_view name, std::size_t line) {
  if (!FeatureCatalog::valid_name(name))
    throw ParseError("invalid feature name '" + std::string(name) + "'", line);
  return std::string(name);
}

std::size_t parse_count(std::string_view text, std::size_t line) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw ParseError("expected a non-negative integer, found '" + std::string(text) + "'",
                     line);
  return value;
}

// Catalog given up front, or built from names in order of first appearance.
class CatalogBuilder {
 public:
  explicit CatalogBuilder(CatalogPtr fixed) : fixed_(std::move(fixed)) {}

  Index index(const std::string& name, std::size_t line) {
    if (fixed_) {
      if (auto i = fixed_->find(name)) return *i;
      throw ParseError("unknown feature '" + name + "'", line);
    }
    for (Index i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return i;
    names_.push_back(name);
    return names_.size() - 1;
  }

  CatalogPtr build() {
    if (fixed_) return fixed_;
    if (names_.size() < 2)
      throw ParseError("input names fewer than 2 features; supply the feature list explicitly",
                       0);
    return make_catalog(names_);
  }

 private:
  CatalogPtr fixed_;
  std::vector<std::string> names_;
};

std::string join_set(const Recourse& r, const FeatureCatalog& catalog) {
  std::string out;
  for (Index f : r.features()) {
    if (!out.empty()) out += ';';
    out += catalog.name(f);
  }
  return out;
}

std::vector<std::string> set_names(const Recourse& r, const FeatureCatalog& catalog) {
  std::vector<std::string> out;
  for (Index f : r.features()) out.push_back(catalog.name(f));
  return out;
}

struct RawRecourse {
  std::vector<Index> winner;
  std::vector<Index> loser;
  std::size_t line;
};

std::vector<Index> indices_of(const std::vector<std::string>& names, CatalogBuilder& builder,
                              std::size_t line) {
  if (names.empty()) throw ParseError("recourse set is empty", line);
  std::vector<Index> out;
  for (const auto& n : names) out.push_back(builder.index(checked_name(n, line), line));
  return out;
}

std::pair<CatalogPtr, Eigen::VectorXd> read_vector(std::string_view content, Format format) {
  std::vector<std::string> names;
  std::vector<double> values;
  if (format == Format::csv) {
    for (const auto& row : csv_rows(content, kVectorHeader)) {
      names.push_back(checked_name(row.fields[0], row.line));
      values.push_back(parse_double(row.fields[1], row.line));
    }
  } else {
    const json doc = parse_json_array(content);
    for (std::size_t i = 0; i < doc.size(); ++i) {
      names.push_back(checked_name(json_field<std::string>(doc[i], "feature", i), 0));
      values.push_back(json_field<double>(doc[i], "value", i));
    }
  }
  CatalogPtr catalog;
  try {
    catalog = make_catalog(names);
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), 0);
  }
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                        static_cast<Eigen::Index>(values.size()));
  if (!v.allFinite()) throw ParseError("values must be finite", 0);
  return {std::move(catalog), std::move(v)};
}

template <typename Vec>
std::string write_vector(const Vec& v, Format format) {
  const auto& catalog = v.catalog();
  if (format == Format::json) {
    json doc = json::array();
    for (Index i = 0; i < v.size(); ++i)
      doc.push_back({{"feature", catalog.name(i)}, {"value", v[i]}});
    return doc.dump(2) + "\n";
  }
  std::string out(kVectorHeader);
  out += '\n';
  for (Index i = 0; i < v.size(); ++i)
    out += catalog.name(i) + "," + format_double(v[i]) + "\n";
  return out;
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw InvalidArgument("unknown format '" + std::string(name) + "' (expected csv or json)");
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw InvalidArgument("cannot format number");
  return std::string(buf, ptr);
}

double parse_double(std::string_view text, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() ||
      !std::isfinite(value))
    throw ParseError("expected a finite number, found '" + std::string(text) + "'", line);
  return value;
}

// ---------------------------------------------------------------------------
// pairwise

std::string write_pairwise(const ComparisonDataset& dataset, Format format) {
  const auto& catalog = dataset.catalog();
  if (format == Format::json) {
    json doc = json::array();
    for (const auto& r : dataset.records())
      doc.push_back(
          {{"winner", catalog.name(r.winner)}, {"loser", catalog.name(r.loser)}, {"weight", r.weight}});
    return doc.dump(2) + "\n";
  }
  std::string out(kPairwiseHeader);
  out += '\n';
  for (const auto& r : dataset.records())
    out += catalog.name(r.winner) + "," + catalog.name(r.loser) + "," + format_double(r.weight) +
           "\n";
  return out;
}

ComparisonDataset read_pairwise(std::string_view content, Format format, CatalogPtr catalog) {
  CatalogBuilder builder(std::move(catalog));
  std::vector<PairwiseComparison> records;
  auto add = [&](const std::string& w, const std::string& l, double weight, std::size_t line) {
    if (w == l) throw ParseError("winner and loser are the same feature", line);
    if (!(weight > 0.0)) throw ParseError("weight must be positive", line);
    records.push_back({builder.index(checked_name(w, line), line),
                       builder.index(checked_name(l, line), line), weight});
  };
  if (format == Format::csv) {
    for (const auto& row : csv_rows(content, kPairwiseHeader))
      add(std::string(row.fields[0]), std::string(row.fields[1]),
          parse_double(row.fields[2], row.line), row.line);
  } else {
    const json doc = parse_json_array(content);
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const double weight = json_field<double>(doc[i], "weight", i);
      if (!std::isfinite(weight)) throw ParseError("weight must be finite", 0);
      add(json_field<std::string>(doc[i], "winner", i), json_field<std::string>(doc[i], "loser", i),
          weight, 0);
    }
  }
  return ComparisonDataset(builder.build(), std::move(records));
}

// ---------------------------------------------------------------------------
// recourse

std::string write_recourses(std::span<const RecourseComparison> records,
                            const FeatureCatalog& catalog, Format format) {
  if (format == Format::json) {
    json doc = json::array();
    for (const auto& r : records)
      doc.push_back({{"winner_set", set_names(r.winner(), catalog)},
                     {"loser_set", set_names(r.loser(), catalog)}});
    return doc.dump(2) + "\n";
  }
  std::string out(kRecourseHeader);
  out += '\n';
  for (const auto& r : records)
    out += join_set(r.winner(), catalog) + "," + join_set(r.loser(), catalog) + "\n";
  return out;
}

RecourseSurvey read_recourses(std::string_view content, Format format, CatalogPtr catalog) {
  CatalogBuilder builder(std::move(catalog));
  std::vector<RawRecourse> raw;
  auto cell_names = [](std::string_view cell) {
    std::vector<std::string> names;
    if (cell.empty()) return names;
    for (auto part : split(cell, ';')) names.emplace_back(part);
    return names;
  };
  if (format == Format::csv) {
    for (const auto& row : csv_rows(content, kRecourseHeader))
      raw.push_back({indices_of(cell_names(row.fields[0]), builder, row.line),
                     indices_of(cell_names(row.fields[1]), builder, row.line), row.line});
  } else {
    const json doc = parse_json_array(content);
    for (std::size_t i = 0; i < doc.size(); ++i)
      raw.push_back(
          {indices_of(json_field<std::vector<std::string>>(doc[i], "winner_set", i), builder, 0),
           indices_of(json_field<std::vector<std::string>>(doc[i], "loser_set", i), builder, 0),
           0});
  }
  RecourseSurvey survey{builder.build(), {}};
  survey.records.reserve(raw.size());
  for (const auto& r : raw) {
    try {
      survey.records.emplace_back(Recourse(*survey.catalog, r.winner),
                                  Recourse(*survey.catalog, r.loser));
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), r.line);
    }
  }
  return survey;
}

// ---------------------------------------------------------------------------
// vectors

std::string write_strengths(const StrengthVector& beta, Format format) {
  return write_vector(beta, format);
}

std::string write_costs(const CostVector& costs, Format format) {
  return write_vector(costs, format);
}

StrengthVector read_strengths(std::string_view content, Format format) {
  auto [catalog, values] = read_vector(content, format);
  return StrengthVector(std::move(catalog), std::move(values));
}

CostVector read_costs(std::string_view content, Format format) {
  auto [catalog, values] = read_vector(content, format);
  return CostVector(std::move(catalog), std::move(values));
}

// ---------------------------------------------------------------------------
// experiment

std::string write_experiment(const ExperimentReport& report, Format format) {
  if (format == Format::json) {
    json doc = json::array();
    for (const auto& r : report.rows)
      doc.push_back({{"trial", r.trial},
                     {"num_features", r.num_features},
                     {"recourse_size", r.recourse_size},
                     {"total_comparisons", r.total_comparisons},
                     {"comparisons_per_feature", r.comparisons_per_feature},
                     {"mse", r.mse},
                     {"runtime_ms", r.runtime_ms},
                     {"converged", r.converged}});
    return doc.dump(2) + "\n";
  }
  std::ostringstream out;
  out << kExperimentHeader << '\n';
  for (const auto& r : report.rows)
    out << r.trial << ',' << r.num_features << ',' << r.recourse_size << ','
        << r.total_comparisons << ',' << format_double(r.comparisons_per_feature) << ','
        << format_double(r.mse) << ',' << format_double(r.runtime_ms) << ','
        << (r.converged ? 1 : 0) << '\n';
  return out.str();
}

ExperimentReport read_experiment(std::string_view content, Format format) {
  ExperimentReport report;
  if (format == Format::csv) {
    for (const auto& row : csv_rows(content, kExperimentHeader)) {
      const auto& f = row.fields;
      ExperimentRow r;
      r.trial = parse_count(f[0], row.line);
      r.num_features = parse_count(f[1], row.line);
      r.recourse_size = parse_count(f[2], row.line);
      r.total_comparisons = parse_count(f[3], row.line);
      r.comparisons_per_feature = parse_double(f[4], row.line);
      r.mse = parse_double(f[5], row.line);
      r.runtime_ms = parse_double(f[6], row.line);
      if (f[7] != "0" && f[7] != "1")
        throw ParseError("converged must be 0 or 1, found '" + std::string(f[7]) + "'", row.line);
      r.converged = f[7] == "1";
      if (r.mse < 0.0 || r.runtime_ms < 0.0)
        throw ParseError("mse and runtime_ms must be non-negative", row.line);
      report.rows.push_back(r);
    }
    return report;
  }
  const json doc = parse_json_array(content);
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& j = doc[i];
    ExperimentRow r;
    r.trial = json_field<std::size_t>(j, "trial", i);
    r.num_features = json_field<std::size_t>(j, "num_features", i);
    r.recourse_size = json_field<std::size_t>(j, "recourse_size", i);
    r.total_comparisons = json_field<std::size_t>(j, "total_comparisons", i);
    r.comparisons_per_feature = json_field<double>(j, "comparisons_per_feature", i);
    r.mse = json_field<double>(j, "mse", i);
    r.runtime_ms = json_field<double>(j, "runtime_ms", i);
    r.converged = json_field<bool>(j, "converged", i);
    report.rows.push_back(r);
  }
  return report;
}

// ---------------------------------------------------------------------------
// files

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::string& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move output into '" + path + "': " + ec.message());
  }
}

}  // namespace btcost::io
