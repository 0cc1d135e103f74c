#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "entropy_embed/nue.hpp"
#include "entropy_embed/simgen.hpp"

namespace entropy_embed {

struct ConfusionCounts {
  long tp = 0;
  long tn = 0;
  long fp = 0;
  long fn = 0;

  long total() const { return tp + tn + fp + fn; }
  /// Percentages. A rate whose denominator is zero is reported as 100.
  double acc() const;
  double tpr() const;
  double tnr() const;

  ConfusionCounts& operator+=(const ConfusionCounts& o);
};

/// Counts over all ordered pairs (x != y) of a [source][target] detection
/// matrix against the true edge set. Throws ShapeMismatch for non-square
/// input or a nonzero diagonal.
ConfusionCounts score(const Eigen::MatrixXi& binary, const GroundTruth& truth);

enum class Model { Henon, Ar };
std::string to_string(Model model);
Model parse_model(const std::string& name);

/// Generates one benchmark dataset; alpha > 0 mixes the channels.
Simulation simulate(Model model, int samples, double coupling, double alpha, std::uint64_t seed);

struct RunSpec {
  Algorithm algorithm = Algorithm::Msr;
  double lambda = 0.0;
  double gamma = 0.0;
};

/// One point of the experiment grid.
struct GridCell {
  Model model = Model::Henon;
  RunSpec run;
  int samples = 512;
  double coupling = 0.6;
  double alpha = 0.0;
};

/// Cartesian product of data parameters and algorithm runs.
///
/// JSON form:
///   {"model": "henon", "N": [512], "Q": [0.6], "alpha": [0],
///    "runs": [{"algorithm": "msr", "lambda": [0, 1], "gamma": [0]},
///             {"algorithm": "bootstrap"}],
///    "m": 1, "d": 5, "k_neighbors": 10, "theiler": 0,
///    "bootstrap_size": 100, "percentile": 95,
///    "realizations": 20, "seed": 1}
/// Only "model" and "runs" are required.
struct GridSpec {
  Model model = Model::Henon;
  std::vector<int> lengths{512};
  std::vector<double> couplings{0.6};
  std::vector<double> alphas{0.0};
  std::vector<RunSpec> runs;
  NueConfig base;
  int realizations = 20;
  std::uint64_t seed = 1;

  /// Throws InvalidArgument on schema errors.
  static GridSpec from_json(const nlohmann::json& j);
  std::vector<GridCell> cells() const;
};

struct RealizationRow {
  GridCell cell;
  int realization = 0;
  ConfusionCounts counts;
  int iterations = 0;  ///< summed over targets
  double seconds = 0.0;
  bool failed = false;
};

/// Means over the successful realizations of one grid cell.
struct BenchmarkRow {
  GridCell cell;
  double acc = 0.0;
  double tpr = 0.0;
  double tnr = 0.0;
  double iterations = 0.0;
  double seconds = 0.0;
  int realizations = 0;
  int failed = 0;
};

struct GridResult {
  std::vector<BenchmarkRow> rows;
  std::vector<RealizationRow> realizations;
};

struct GridOptions {
  /// Run realizations of a cell concurrently. Disable for wall-clock comparisons.
  bool parallel_realizations = true;
  std::function<void(const BenchmarkRow&, std::size_t index, std::size_t total)> progress;
};

/// Seed of the dataset for one realization; shared by all runs of a grid so
/// algorithms are compared on identical data.
std::uint64_t dataset_seed(std::uint64_t grid_seed, Model model, int samples, double coupling,
                           double alpha, int realization);

NueConfig cell_config(const NueConfig& base, const GridCell& cell, std::uint64_t seed);

/// Analyzes one realization of a cell: generate, run dependency_matrix, score.
RealizationRow run_realization(const GridSpec& spec, const GridCell& cell, int realization);

GridResult run_grid(const GridSpec& spec, const GridOptions& options = {});

/// Aggregates realizations of one cell (failed ones excluded).
BenchmarkRow aggregate(const GridCell& cell, const std::vector<RealizationRow>& rows);

/// Columns: algorithm,model,N,Q,alpha,lambda,gamma,acc,tpr,tnr,iterations,seconds
void write_aggregate_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows);
/// Same columns plus realization,tp,tn,fp,fn,failed.
void write_realization_csv(std::ostream& out, const std::vector<RealizationRow>& rows);

}  // namespace entropy_embed
