#include "commands.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "btcost/core.hpp"
#include "btcost/inference.hpp"
#include "btcost/io.hpp"
#include "btcost/random.hpp"
#include "btcost/simulation.hpp"

namespace btcost::cli {

namespace {

// Input files are read as JSON when named *.json, CSV otherwise.
io::Format format_for_path(const std::string& path) {
  return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0 ? io::Format::json
                                                                             : io::Format::csv;
}

std::vector<std::string> split_names(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

LabelMode parse_label_mode(const std::string& s) {
  if (s == "bernoulli") return LabelMode::bernoulli;
  if (s == "deterministic") return LabelMode::deterministic;
  throw InvalidArgument("unknown label mode '" + s + "'");
}

struct SimulatePairwiseArgs {
  std::size_t num_features = 0;
  std::size_t comparisons = 0;
  std::uint64_t seed = 0;
  std::string beta_out, out, format = "csv";
};

struct SimulateRecourseArgs {
  std::size_t num_features = 20;
  std::size_t recourse_size = 2;
  std::size_t comparisons = 0;
  std::uint64_t seed = 0;
  std::string label_mode = "bernoulli";
  std::string beta_out, out, format = "csv";
};

struct EstimateArgs {
  std::string input, input_kind = "pairwise", features, catalog;
  double pseudo_count = 0.1;
  double tol = 1e-8;
  int max_iter = 10000;
  std::string out, costs_out, format = "csv";
};

struct CompareArgs {
  std::string costs, recourse_a, recourse_b, format = "csv";
  std::optional<std::uint64_t> mc_samples, seed;
};

struct ExperimentArgs {
  std::string kind, preset;
  std::vector<std::size_t> num_features, recourse_sizes, schedule;
  std::optional<std::size_t> trials;
  std::uint64_t seed = 0;
  double pseudo_count = 0.1;
  std::string label_mode = "bernoulli";
  std::string out, format = "csv";
};

struct ConvertArgs {
  std::string input, to, out, format = "csv";
};

int simulate_pairwise(const SimulatePairwiseArgs& a) {
  const auto format = io::parse_format(a.format);
  const StrengthVector beta = draw_true_strengths(a.num_features, a.seed);
  const ComparisonDataset data =
      simulate_pairwise_survey(beta, a.comparisons, derive_seed(a.seed, 1));
  io::write_file_atomic(a.beta_out, io::write_strengths(beta, format));
  io::write_file_atomic(a.out, io::write_pairwise(data, format));
  return kExitOk;
}

int simulate_recourse(const SimulateRecourseArgs& a) {
  const auto format = io::parse_format(a.format);
  const auto mode = parse_label_mode(a.label_mode);
  if (a.recourse_size == 0 || 2 * a.recourse_size > a.num_features)
    throw InvalidArgument("--recourse-size must satisfy 1 <= 2 * size <= --num-features");
  const StrengthVector beta = draw_true_strengths(a.num_features, a.seed);
  const auto survey = simulate_recourse_survey(beta, a.recourse_size, a.comparisons,
                                               derive_seed(a.seed, 1), mode);
  io::write_file_atomic(a.beta_out, io::write_strengths(beta, format));
  io::write_file_atomic(a.out, io::write_recourses(survey, beta.catalog(), format));
  return kExitOk;
}

int estimate(const EstimateArgs& a, std::ostream& err) {
  const auto format = io::parse_format(a.format);
  EstimatorConfig config;
  config.pseudo_count = a.pseudo_count;
  config.tolerance = a.tol;
  config.max_iterations = a.max_iter;
  config.validate();

  CatalogPtr catalog;
  if (!a.features.empty() && !a.catalog.empty())
    throw InvalidArgument("--features and --catalog are mutually exclusive");
  if (!a.features.empty()) catalog = make_catalog(split_names(a.features, ','));
  if (!a.catalog.empty())
    catalog =
        io::read_strengths(io::read_file(a.catalog), format_for_path(a.catalog)).catalog_ptr();

  const std::string content = io::read_file(a.input);
  const auto in_format = format_for_path(a.input);
  std::size_t skipped = 0;
  std::optional<ComparisonDataset> data;
  if (a.input_kind == "pairwise") {
    data = io::read_pairwise(content, in_format, catalog);
  } else if (a.input_kind == "recourse") {
    const auto survey = io::read_recourses(content, in_format, catalog);
    auto expanded = expand_recourse_comparisons(survey.records, survey.catalog);
    skipped = expanded.skipped;
    data = std::move(expanded.dataset);
  } else {
    throw InvalidArgument("--input-kind must be pairwise or recourse");
  }

  const EstimateResult fit = map_estimate(*data, config);
  io::write_file_atomic(a.out, io::write_strengths(fit.strengths, format));
  if (!a.costs_out.empty())
    io::write_file_atomic(a.costs_out, io::write_costs(costs_from_strengths(fit.strengths), format));

  err << "iterations=" << fit.iterations << " converged=" << (fit.converged ? "true" : "false")
      << " final_delta=" << io::format_double(fit.final_delta)
      << " log_posterior=" << io::format_double(fit.log_posterior);
  if (a.input_kind == "recourse") err << " skipped_records=" << skipped;
  err << '\n';
  if (!fit.converged) {
    err << "error: no convergence within " << a.max_iter << " iterations; best iterate written\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int compare(const CompareArgs& a, std::ostream& out) {
  const auto format = io::parse_format(a.format);
  if (a.mc_samples && !a.seed) throw InvalidArgument("--mc-samples requires --seed");
  const CostVector costs = io::read_costs(io::read_file(a.costs), format_for_path(a.costs));
  const auto& catalog = costs.catalog();
  const Recourse ra = Recourse::from_names(catalog, split_names(a.recourse_a, ';'));
  const Recourse rb = Recourse::from_names(catalog, split_names(a.recourse_b, ';'));

  std::optional<MonteCarloSettings> mc;
  if (a.mc_samples) mc = MonteCarloSettings{*a.mc_samples, *a.seed};
  const RecourseOrdering r = compare_recourses(ra, rb, costs, mc);
  const char* easier = r.easier == Easier::first ? "A" : r.easier == Easier::second ? "B" : "tie";

  if (format == io::Format::json) {
    out << nlohmann::json{{"rho_ab", r.rho_12}, {"rho_ba", r.rho_21}, {"easier", easier}}.dump()
        << '\n';
  } else {
    out << "rho_ab=" << io::format_double(r.rho_12) << " rho_ba=" << io::format_double(r.rho_21)
        << " easier=" << easier << '\n';
  }
  return kExitOk;
}

int experiment(ExperimentArgs a, std::ostream& err) {
  const auto format = io::parse_format(a.format);
  if (a.preset == "figure2") {
    if (a.kind.empty()) a.kind = "pairwise";
    if (a.num_features.empty()) a.num_features = {5, 10, 15, 20};
  } else if (a.preset == "figure4") {
    if (a.kind.empty()) a.kind = "recourse";
    if (a.num_features.empty()) a.num_features = {20};
    if (a.recourse_sizes.empty()) a.recourse_sizes = {1, 2, 3, 4, 5, 6};
  } else if (!a.preset.empty()) {
    throw InvalidArgument("unknown preset '" + a.preset + "'");
  }
  if (!a.preset.empty()) {
    if (a.schedule.empty()) a.schedule = {50, 100, 200, 500};
    if (!a.trials) a.trials = 10;
  }
  if (a.kind.empty()) throw InvalidArgument("--kind or --preset is required");
  if (a.kind == "recourse" && a.num_features.empty()) a.num_features = {20};
  if (a.num_features.empty()) throw InvalidArgument("--num-features is required");
  if (a.schedule.empty()) throw InvalidArgument("--schedule is required");
  if (!a.trials) a.trials = 10;

  EstimatorConfig estimator;
  estimator.pseudo_count = a.pseudo_count;

  // The schedule is given per feature; configs take totals.
  auto totals_for = [&](std::size_t n) {
    std::vector<std::size_t> totals;
    for (std::size_t per : a.schedule) totals.push_back(per * n);
    return totals;
  };

  ExperimentReport report;
  auto append = [&](const ExperimentReport& part) {
    report.rows.insert(report.rows.end(), part.rows.begin(), part.rows.end());
  };

  if (a.kind == "pairwise") {
    for (std::size_t n : a.num_features) {
      PairwiseSimConfig config{n, totals_for(n), *a.trials, a.seed, estimator};
      append(run_pairwise_experiment(config));
      err << "pairwise |F|=" << n << " done\n";
    }
  } else if (a.kind == "recourse") {
    const auto mode = parse_label_mode(a.label_mode);
    if (a.recourse_sizes.empty()) a.recourse_sizes = {2, 3, 4, 5, 6};
    for (std::size_t n : a.num_features)
      for (std::size_t size : a.recourse_sizes) {
        RecourseSimConfig config{n, size, totals_for(n), *a.trials, a.seed, mode, estimator};
        append(run_recourse_experiment(config));
        err << "recourse |F|=" << n << " size=" << size << " done\n";
      }
  } else {
    throw InvalidArgument("--kind must be pairwise or recourse");
  }

  std::size_t not_converged = 0;
  for (const auto& row : report.rows) not_converged += row.converged ? 0 : 1;
  if (not_converged > 0) err << "warning: " << not_converged << " fits did not converge\n";

  io::write_file_atomic(a.out, io::write_experiment(report, format));
  return kExitOk;
}

int convert(const ConvertArgs& a) {
  const auto format = io::parse_format(a.format);
  const std::string content = io::read_file(a.input);
  const auto in_format = format_for_path(a.input);
  if (a.to == "costs") {
    io::write_file_atomic(a.out,
                          io::write_costs(costs_from_strengths(io::read_strengths(content, in_format)),
                                          format));
  } else if (a.to == "strengths") {
    io::write_file_atomic(a.out,
                          io::write_strengths(strengths_from_costs(io::read_costs(content, in_format)),
                                              format));
  } else {
    throw InvalidArgument("--to must be costs or strengths");
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Infer feature modification costs from pairwise and recourse comparisons"};
  app.require_subcommand(1);

  SimulatePairwiseArgs sp;
  auto* sp_cmd = app.add_subcommand("simulate-pairwise", "Simulate a pairwise feature survey");
  sp_cmd->add_option("--num-features", sp.num_features, "Number of features")->required();
  sp_cmd->add_option("--comparisons", sp.comparisons, "Number of comparisons")->required();
  sp_cmd->add_option("--seed", sp.seed, "Random seed")->required();
  sp_cmd->add_option("--beta-out", sp.beta_out, "Generating strengths output")->required();
  sp_cmd->add_option("--out", sp.out, "Survey output")->required();
  sp_cmd->add_option("--format", sp.format, "csv or json");

  SimulateRecourseArgs sr;
  auto* sr_cmd = app.add_subcommand("simulate-recourse", "Simulate a recourse-level survey");
  sr_cmd->add_option("--num-features", sr.num_features, "Number of features");
  sr_cmd->add_option("--recourse-size", sr.recourse_size, "Features per recourse");
  sr_cmd->add_option("--comparisons", sr.comparisons, "Number of comparisons")->required();
  sr_cmd->add_option("--seed", sr.seed, "Random seed")->required();
  sr_cmd->add_option("--label-mode", sr.label_mode, "bernoulli or deterministic");
  sr_cmd->add_option("--beta-out", sr.beta_out, "Generating strengths output")->required();
  sr_cmd->add_option("--out", sr.out, "Survey output")->required();
  sr_cmd->add_option("--format", sr.format, "csv or json");

  EstimateArgs es;
  auto* es_cmd = app.add_subcommand("estimate", "Fit strengths from a survey file");
  es_cmd->add_option("--input", es.input, "Survey file (*.json read as JSON)")->required();
  es_cmd->add_option("--input-kind", es.input_kind, "pairwise or recourse");
  es_cmd->add_option("--features", es.features,
                     "Comma-separated catalog; default is order of appearance in the input");
  es_cmd->add_option("--catalog", es.catalog,
                     "Take the catalog from the feature column of a strengths/costs file");
  es_cmd->add_option("--pseudo-count", es.pseudo_count, "Pseudo-comparisons per feature pair");
  es_cmd->add_option("--tol", es.tol, "Convergence threshold on max |delta beta|");
  es_cmd->add_option("--max-iter", es.max_iter, "Iteration limit");
  es_cmd->add_option("--out", es.out, "Strengths output")->required();
  es_cmd->add_option("--costs-out", es.costs_out, "Costs output");
  es_cmd->add_option("--format", es.format, "Output format: csv or json");

  CompareArgs cp;
  auto* cp_cmd = app.add_subcommand("compare", "Compare two recourses under a cost vector");
  cp_cmd->add_option("--costs", cp.costs, "Costs file")->required();
  cp_cmd->add_option("--recourse-a", cp.recourse_a, "Features of recourse A, ';'-separated")
      ->required();
  cp_cmd->add_option("--recourse-b", cp.recourse_b, "Features of recourse B, ';'-separated")
      ->required();
  cp_cmd->add_option("--mc-samples", cp.mc_samples, "Use a Monte Carlo estimate");
  cp_cmd->add_option("--seed", cp.seed, "Seed for --mc-samples");
  cp_cmd->add_option("--format", cp.format, "csv (key=value line) or json");

  ExperimentArgs ex;
  auto* ex_cmd = app.add_subcommand("experiment", "Run a parameter-recovery experiment");
  ex_cmd->add_option("--kind", ex.kind, "pairwise or recourse");
  ex_cmd->add_option("--preset", ex.preset, "figure2 or figure4");
  ex_cmd->add_option("--num-features", ex.num_features, "Feature counts")->delimiter(',');
  ex_cmd->add_option("--recourse-size", ex.recourse_sizes, "Recourse sizes")->delimiter(',');
  ex_cmd->add_option("--schedule", ex.schedule, "Comparisons per feature at each point")
      ->delimiter(',');
  ex_cmd->add_option("--trials", ex.trials, "Trials per configuration");
  ex_cmd->add_option("--seed", ex.seed, "Random seed")->required();
  ex_cmd->add_option("--pseudo-count", ex.pseudo_count, "Estimator pseudo-count");
  ex_cmd->add_option("--label-mode", ex.label_mode, "bernoulli or deterministic");
  ex_cmd->add_option("--out", ex.out, "Report output")->required();
  ex_cmd->add_option("--format", ex.format, "csv or json");

  ConvertArgs cv;
  auto* cv_cmd = app.add_subcommand("convert", "Convert between strengths and costs");
  cv_cmd->add_option("--input", cv.input, "Strengths or costs file")->required();
  cv_cmd->add_option("--to", cv.to, "costs or strengths")->required();
  cv_cmd->add_option("--out", cv.out, "Output file")->required();
  cv_cmd->add_option("--format", cv.format, "csv or json");

  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kExitInvalid;
  }

  try {
    if (*sp_cmd) return simulate_pairwise(sp);
    if (*sr_cmd) return simulate_recourse(sr);
    if (*es_cmd) return estimate(es, err);
    if (*cp_cmd) return compare(cp, out);
    if (*ex_cmd) return experiment(ex, err);
    if (*cv_cmd) return convert(cv);
  } catch (const NonIdentifiableError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace btcost::cli
