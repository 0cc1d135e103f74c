#include "entropy_embed/benchmark.hpp"

#include <cmath>
#include <cstring>
#include <ostream>
#include <random>

#include "entropy_embed/error.hpp"

namespace entropy_embed {

namespace {

double rate(long hit, long total) {
  return total == 0 ? 100.0 : 100.0 * static_cast<double>(hit) / static_cast<double>(total);
}

std::uint64_t bits(double v) {
  std::uint64_t out;
  std::memcpy(&out, &v, sizeof out);
  return out;
}

}  // namespace

double ConfusionCounts::acc() const { return rate(tp + tn, total()); }
double ConfusionCounts::tpr() const { return rate(tp, tp + fn); }
double ConfusionCounts::tnr() const { return rate(tn, tn + fp); }

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
  tp += o.tp;
  tn += o.tn;
  fp += o.fp;
  fn += o.fn;
  return *this;
}

ConfusionCounts score(const Eigen::MatrixXi& binary, const GroundTruth& truth) {
  if (binary.rows() != binary.cols()) throw ShapeMismatch("detection matrix must be square");
  const int l = static_cast<int>(binary.rows());
  ConfusionCounts c;
  for (int x = 0; x < l; ++x) {
    if (binary(x, x) != 0) throw ShapeMismatch("detection matrix has a nonzero diagonal");
    for (int y = 0; y < l; ++y) {
      if (x == y) continue;
      const bool detected = binary(x, y) != 0;
      const bool edge = truth.has_edge(x, y);
      if (edge && detected) ++c.tp;
      else if (edge) ++c.fn;
      else if (detected) ++c.fp;
      else ++c.tn;
    }
  }
  for (const auto& [s, t] : truth.edges)
    if (s < 0 || t < 0 || s >= l || t >= l) throw ShapeMismatch("ground truth edge out of range");
  return c;
}

std::string to_string(Model model) { return model == Model::Henon ? "henon" : "ar"; }

Model parse_model(const std::string& name) {
  if (name == "henon") return Model::Henon;
  if (name == "ar") return Model::Ar;
  throw InvalidArgument("unknown model '" + name + "'");
}

Simulation simulate(Model model, int samples, double coupling, double alpha, std::uint64_t seed) {
  Simulation sim = model == Model::Henon ? henon(samples, coupling, seed) : nonlinear_ar(samples, seed);
  if (alpha != 0.0) sim.series = mix(sim.series, alpha);
  return sim;
}

namespace {

template <class T>
std::vector<T> number_list(const nlohmann::json& j, const char* key, std::vector<T> fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  std::vector<T> out;
  if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number()) throw InvalidArgument(std::string("'") + key + "' must hold numbers");
      out.push_back(x.get<T>());
    }
  } else if (v.is_number()) {
    out.push_back(v.get<T>());
  } else {
    throw InvalidArgument(std::string("'") + key + "' must be a number or a list");
  }
  return out;
}

}  // namespace

GridSpec GridSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("grid spec must be a JSON object");
  GridSpec spec;
  try {
    if (!j.contains("model")) throw InvalidArgument("grid spec needs 'model'");
    spec.model = parse_model(j.at("model").get<std::string>());
    spec.lengths = number_list<int>(j, "N", spec.lengths);
    spec.couplings = number_list<double>(j, "Q", spec.couplings);
    spec.alphas = number_list<double>(j, "alpha", spec.alphas);
    spec.base.delay = j.value("m", spec.base.delay);
    spec.base.dimension = j.value("d", spec.base.dimension);
    spec.base.neighbors = j.value("k_neighbors", spec.base.neighbors);
    spec.base.theiler = j.value("theiler", spec.base.theiler);
    spec.base.bootstrap_size = j.value("bootstrap_size", spec.base.bootstrap_size);
    spec.base.percentile = j.value("percentile", spec.base.percentile);
    spec.realizations = j.value("realizations", spec.realizations);
    spec.seed = j.value("seed", spec.seed);
    if (!j.contains("runs") || !j.at("runs").is_array())
      throw InvalidArgument("grid spec needs a 'runs' list");
    for (const auto& r : j.at("runs")) {
      const Algorithm algorithm = parse_algorithm(r.at("algorithm").get<std::string>());
      if (algorithm != Algorithm::Msr) {
        spec.runs.push_back({algorithm, 0.0, 0.0});
        continue;
      }
      for (double lambda : number_list<double>(r, "lambda", {0.5}))
        for (double gamma : number_list<double>(r, "gamma", {0.0}))
          spec.runs.push_back({algorithm, lambda, gamma});
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("grid spec: ") + e.what());
  }
  if (spec.realizations < 1) throw InvalidArgument("realizations must be >= 1");
  for (const auto& r : spec.runs) {
    NueConfig c = spec.base;
    c.algorithm = r.algorithm;
    c.lambda = r.lambda;
    c.gamma = r.gamma;
    c.validate();
  }
  return spec;
}

std::vector<GridCell> GridSpec::cells() const {
  std::vector<GridCell> out;
  for (int n : lengths)
    for (double q : couplings)
      for (double a : alphas)
        for (const auto& r : runs) out.push_back({model, r, n, q, a});
  return out;
}

std::uint64_t dataset_seed(std::uint64_t grid_seed, Model model, int samples, double coupling,
                           double alpha, int realization) {
  const std::uint64_t q = bits(coupling), a = bits(alpha);
  std::seed_seq seq{static_cast<std::uint32_t>(grid_seed), static_cast<std::uint32_t>(grid_seed >> 32),
                    static_cast<std::uint32_t>(model), static_cast<std::uint32_t>(samples),
                    static_cast<std::uint32_t>(q), static_cast<std::uint32_t>(q >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(realization)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

NueConfig cell_config(const NueConfig& base, const GridCell& cell, std::uint64_t seed) {
  NueConfig c = base;
  c.algorithm = cell.run.algorithm;
  c.lambda = cell.run.lambda;
  c.gamma = cell.run.gamma;
  c.seed = seed;
  return c;
}

RealizationRow run_realization(const GridSpec& spec, const GridCell& cell, int realization) {
  RealizationRow row;
  row.cell = cell;
  row.realization = realization;
  try {
    const std::uint64_t seed =
        dataset_seed(spec.seed, cell.model, cell.samples, cell.coupling, cell.alpha, realization);
    const Simulation sim = simulate(cell.model, cell.samples, cell.coupling, cell.alpha, seed);
    const DependencyResult result = dependency_matrix(sim.series, cell_config(spec.base, cell, seed));
    row.counts = score(result.binary, sim.truth);
    for (const auto& t : result.traces) row.iterations += t.iterations();
    row.seconds = result.total_seconds;
  } catch (const Error&) {
    row.failed = true;
  }
  return row;
}

BenchmarkRow aggregate(const GridCell& cell, const std::vector<RealizationRow>& rows) {
  BenchmarkRow out;
  out.cell = cell;
  for (const auto& r : rows) {
    if (r.failed) {
      ++out.failed;
      continue;
    }
    ++out.realizations;
    out.acc += r.counts.acc();
    out.tpr += r.counts.tpr();
    out.tnr += r.counts.tnr();
    out.iterations += r.iterations;
    out.seconds += r.seconds;
  }
  if (out.realizations > 0) {
    const double k = out.realizations;
    out.acc /= k;
    out.tpr /= k;
    out.tnr /= k;
    out.iterations /= k;
    out.seconds /= k;
  }
  return out;
}

GridResult run_grid(const GridSpec& spec, const GridOptions& options) {
  GridResult result;
  const auto cells = spec.cells();
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const GridCell& cell = cells[ci];
    std::vector<RealizationRow> rows(static_cast<std::size_t>(spec.realizations));
#pragma omp parallel for schedule(dynamic, 1) if (options.parallel_realizations)
    for (int r = 0; r < spec.realizations; ++r)
      rows[static_cast<std::size_t>(r)] = run_realization(spec, cell, r);
    result.rows.push_back(aggregate(cell, rows));
    result.realizations.insert(result.realizations.end(), rows.begin(), rows.end());
    if (options.progress) options.progress(result.rows.back(), ci, cells.size());
  }
  return result;
}

namespace {

void write_cell(std::ostream& out, const GridCell& c) {
  out << to_string(c.run.algorithm) << ',' << to_string(c.model) << ',' << c.samples << ','
      << format_double(c.coupling) << ',' << format_double(c.alpha) << ','
      << format_double(c.run.lambda) << ',' << format_double(c.run.gamma);
}

constexpr const char* kColumns =
    "algorithm,model,N,Q,alpha,lambda,gamma,acc,tpr,tnr,iterations,seconds";

}  // namespace

void write_aggregate_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows) {
  out << kColumns << '\n';
  for (const auto& r : rows) {
    write_cell(out, r.cell);
    out << ',' << format_double(r.acc) << ',' << format_double(r.tpr) << ','
        << format_double(r.tnr) << ',' << format_double(r.iterations) << ','
        << format_double(r.seconds) << '\n';
  }
}

void write_realization_csv(std::ostream& out, const std::vector<RealizationRow>& rows) {
  out << kColumns << ",realization,tp,tn,fp,fn,failed\n";
  for (const auto& r : rows) {
    write_cell(out, r.cell);
    out << ',' << format_double(r.counts.acc()) << ',' << format_double(r.counts.tpr()) << ','
        << format_double(r.counts.tnr()) << ',' << r.iterations << ','
        << format_double(r.seconds) << ',' << r.realization << ',' << r.counts.tp << ','
        << r.counts.tn << ',' << r.counts.fp << ',' << r.counts.fn << ',' << (r.failed ? 1 : 0)
        << '\n';
  }
}

}  // namespace entropy_embed
