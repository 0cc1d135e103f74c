// Command-line front end: simulate benchmark data, analyze a CSV recording,
// or run an experiment grid.
//
// Exit codes: 0 success, 1 unexpected failure, 2 invalid flags or
// parameters, 3 malformed input file, 4 series too short.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "entropy_embed/benchmark.hpp"
#include "entropy_embed/error.hpp"
#include "entropy_embed/report.hpp"
#include "entropy_embed/workers.hpp"

namespace ee = entropy_embed;

namespace {

constexpr int kExitFlags = 2;
constexpr int kExitInput = 3;
constexpr int kExitTooShort = 4;

std::string sibling_path(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ee::InvalidArgument("cannot write '" + path + "'");
  return out;
}

struct SimulateOptions {
  std::string model;
  int samples = 512;
  double coupling = 0.6;
  double alpha = 0.0;
  std::uint64_t seed = 1;
  std::string out;
  std::string truth_out;
};

struct AnalyzeOptions {
  std::string input;
  std::string algorithm = "msr";
  std::string aic_rule = "decrease";
  std::string out = "report.json";
  std::string cte_out;
  ee::NueConfig config;
};

struct BenchmarkOptions {
  std::string config;
  std::string out = "benchmark";
  std::optional<int> realizations;
  std::optional<std::uint64_t> seed;
  bool serial_timing = false;
};

int cmd_simulate(const SimulateOptions& o) {
  const auto sim = ee::simulate(ee::parse_model(o.model), o.samples, o.coupling, o.alpha, o.seed);
  ee::write_csv_file(o.out, sim.series);
  const std::string truth_path = o.truth_out.empty() ? sibling_path(o.out, "_truth.json") : o.truth_out;
  open_output(truth_path) << ee::truth_to_json(sim.truth, sim.series);
  std::cout << "wrote " << o.out << " (" << sim.series.channels() << " channels, "
            << sim.series.samples() << " samples) and " << truth_path << " ("
            << sim.truth.edges.size() << " edges)\n";
  return 0;
}

int cmd_analyze(AnalyzeOptions o) {
  o.config.algorithm = ee::parse_algorithm(o.algorithm);
  o.config.aic_rule =
      o.aic_rule == "increase" ? ee::AicRule::IncludeOnIncrease : ee::AicRule::IncludeOnDecrease;
  o.config.validate();
  const ee::MultivariateSeries series = ee::read_csv_file(o.input);
  const ee::DependencyResult result = ee::dependency_matrix(series, o.config);
  open_output(o.out) << ee::analysis_report(series, o.config, result).dump(2) << '\n';
  const std::string cte_path = o.cte_out.empty() ? sibling_path(o.out, "_cte.csv") : o.cte_out;
  auto cte = open_output(cte_path);
  ee::write_cte_csv(cte, series, result.cte);
  ee::print_summary(std::cout, series, result);
  std::cout << "report: " << o.out << "\ncte matrix: " << cte_path << '\n';
  return 0;
}

int cmd_benchmark(const BenchmarkOptions& o) {
  std::ifstream in(o.config);
  if (!in) throw ee::MalformedCsv("cannot open grid config '" + o.config + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ee::MalformedCsv("grid config is not valid JSON: " + std::string(e.what()));
  }
  ee::GridSpec spec = ee::GridSpec::from_json(j);
  if (o.realizations) spec.realizations = *o.realizations;
  if (o.seed) spec.seed = *o.seed;
  if (spec.realizations < 1) throw ee::InvalidArgument("--realizations must be >= 1");

  ee::GridOptions options;
  options.parallel_realizations = !o.serial_timing;
  options.progress = [](const ee::BenchmarkRow& r, std::size_t i, std::size_t total) {
    std::cerr << "[" << i + 1 << "/" << total << "] " << ee::to_string(r.cell.run.algorithm)
              << " N=" << r.cell.samples << " Q=" << r.cell.coupling << " alpha=" << r.cell.alpha
              << " lambda=" << r.cell.run.lambda << " gamma=" << r.cell.run.gamma
              << "  ACC=" << r.acc << " TPR=" << r.tpr << " TNR=" << r.tnr
              << " iters=" << r.iterations << " s=" << r.seconds;
    if (r.failed > 0) std::cerr << "  (" << r.failed << " failed realizations)";
    std::cerr << '\n';
  };
  const ee::GridResult result = ee::run_grid(spec, options);
  const std::string aggregate = o.out + "_aggregate.csv";
  const std::string per = o.out + "_realizations.csv";
  auto a = open_output(aggregate);
  ee::write_aggregate_csv(a, result.rows);
  auto p = open_output(per);
  ee::write_realization_csv(p, result.realizations);
  std::cout << "wrote " << aggregate << " and " << per << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Directed dependency estimation with non-uniform embedding"};
  app.require_subcommand(1);
  std::optional<int> workers;
  app.add_option("--workers", workers,
                 "Parallel workers (default: ENTROPY_EMBED_WORKERS or all cores)");

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a benchmark dataset");
  simulate->add_option("--model", sim.model, "henon or ar")
      ->required()
      ->check(CLI::IsMember({"henon", "ar"}));
  simulate->add_option("--n", sim.samples, "Samples")->check(CLI::Range(32, 100000000));
  simulate->add_option("--q", sim.coupling, "Henon coupling strength")->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--alpha", sim.alpha, "Instantaneous mixing strength")
      ->check(CLI::Range(0.0, 0.3));
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("--out", sim.out, "Output CSV")->required();
  simulate->add_option("--truth-out", sim.truth_out, "Ground-truth JSON (default <out>_truth.json)");

  AnalyzeOptions an;
  auto* analyze = app.add_subcommand("analyze", "Estimate the directed dependency matrix of a CSV");
  analyze->add_option("--input", an.input, "Input CSV (header of labels, one sample per row)")
      ->required();
  analyze->add_option("--algorithm", an.algorithm, "msr, bootstrap, la or aic")
      ->check(CLI::IsMember({"msr", "bootstrap", "la", "aic"}));
  analyze->add_option("--m", an.config.delay, "Embedding delay")->check(CLI::PositiveNumber);
  analyze->add_option("--d", an.config.dimension, "Embedding dimension")->check(CLI::PositiveNumber);
  analyze->add_option("--k-neighbors", an.config.neighbors, "Nearest neighbors T")
      ->check(CLI::PositiveNumber);
  analyze->add_option("--lambda", an.config.lambda, "CMI/MSR weight")->check(CLI::Range(0.0, 1.0));
  analyze->add_option("--gamma", an.config.gamma, "Required MSR improvement")
      ->check(CLI::NonNegativeNumber);
  analyze->add_option("--theiler", an.config.theiler, "Theiler window (samples)")
      ->check(CLI::NonNegativeNumber);
  analyze->add_option("--seed", an.config.seed, "Random seed");
  analyze->add_option("--bootstrap-size", an.config.bootstrap_size, "Surrogates per test")
      ->check(CLI::PositiveNumber);
  analyze->add_option("--percentile", an.config.percentile, "Surrogate percentile")
      ->check(CLI::Range(0.0, 100.0));
  analyze->add_option("--max-iterations", an.config.max_iterations, "Iteration cap (0: L*d)")
      ->check(CLI::NonNegativeNumber);
  analyze->add_option("--jitter", an.config.jitter, "Tie-breaking noise amplitude")
      ->check(CLI::NonNegativeNumber);
  analyze->add_option("--aic-rule", an.aic_rule, "AIC acceptance direction")
      ->check(CLI::IsMember({"decrease", "increase"}));
  analyze->add_option("--out", an.out, "JSON report path");
  analyze->add_option("--cte-out", an.cte_out, "CTE matrix CSV (default <out>_cte.csv)");

  BenchmarkOptions bo;
  auto* bench = app.add_subcommand("benchmark", "Run an experiment grid");
  bench->add_option("--config", bo.config, "Grid JSON")->required();
  bench->add_option("--out", bo.out, "Output prefix");
  bench->add_option("--realizations", bo.realizations, "Override realizations per cell")
      ->check(CLI::PositiveNumber);
  bench->add_option("--seed", bo.seed, "Override the grid seed");
  bench->add_flag("--serial-timing", bo.serial_timing,
                  "Run realizations one at a time for fair wall-clock numbers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitFlags;
  }

  try {
    ee::set_workers(ee::resolve_workers(workers));
    if (*simulate) return cmd_simulate(sim);
    if (*analyze) return cmd_analyze(an);
    if (*bench) return cmd_benchmark(bo);
  } catch (const ee::MalformedCsv& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ee::SeriesTooShort& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitTooShort;
  } catch (const ee::NotEnoughNeighbors& e) {
    std::cerr << "error: series too short for the neighbor count: " << e.what() << '\n';
    return kExitTooShort;
  } catch (const ee::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFlags;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
