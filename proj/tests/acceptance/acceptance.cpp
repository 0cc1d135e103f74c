// Acceptance suite. One PASS/FAIL line per criterion; exit status 1 if any fails.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "entropy_embed/benchmark.hpp"
#include "entropy_embed/error.hpp"
#include "entropy_embed/estimators.hpp"
#include "entropy_embed/neighbors.hpp"
#include "entropy_embed/nue.hpp"
#include "entropy_embed/prediction.hpp"
#include "entropy_embed/report.hpp"
#include "entropy_embed/simgen.hpp"
#include "entropy_embed/workers.hpp"

using namespace entropy_embed;

namespace {

using clock_type = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

Matrix gaussian(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) m(r, c) = g(rng);
  return m;
}

void progress(const BenchmarkRow& row, std::size_t i, std::size_t total) {
  std::fprintf(stderr, "  [%zu/%zu] %s N=%d Q=%g alpha=%g lambda=%g gamma=%g acc=%.1f tpr=%.1f tnr=%.1f\n",
               i + 1, total, to_string(row.cell.run.algorithm).c_str(), row.cell.samples,
               row.cell.coupling, row.cell.alpha, row.cell.run.lambda, row.cell.run.gamma, row.acc,
               row.tpr, row.tnr);
}

GridResult grid(GridSpec spec, bool parallel = true) {
  GridOptions options;
  options.parallel_realizations = parallel;
  options.progress = progress;
  return run_grid(spec, options);
}

// --- 1: Gaussian MI --------------------------------------------------------

void gaussian_mi(Outcome& out) {
  const auto start = clock_type::now();
  const KsgParams params{10, 0};
  for (double rho : {0.0, 0.5, 0.9}) {
    const double truth = -0.5 * std::log(1.0 - rho * rho);
    double err = 0.0;
    for (int seed = 0; seed < 20; ++seed) {
      const Matrix g = gaussian(2048, 2, 1000 + static_cast<std::uint64_t>(seed));
      const Vector x = g.col(0);
      const Vector y = rho * g.col(0) + std::sqrt(1.0 - rho * rho) * g.col(1);
      err += std::abs(ksg_mi(x, Matrix(y), params) - truth);
    }
    err /= 20.0;
    out.detail << " rho=" << rho << " mae=" << err;
    out.require(err <= 0.05, "mean absolute error at rho=" + std::to_string(rho));
  }
  const double t = seconds_since(start);
  out.detail << " time=" << t << "s";
  out.require(t < 30.0, "runtime under 30 s");
}

// --- 2: neighbor oracle ----------------------------------------------------

double brute_distance(const Matrix& p, Metric metric, Index i, Index j) {
  double acc = 0.0;
  for (Index d = 0; d < p.cols(); ++d) {
    const double diff = p(i, d) - p(j, d);
    acc = metric == Metric::MaxNorm ? std::max(acc, std::abs(diff)) : acc + diff * diff;
  }
  return metric == Metric::MaxNorm ? acc : std::sqrt(acc);
}

void neighbor_oracle(Outcome& out) {
  const auto start = clock_type::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(20, 512), dims(1, 6), pick(0, 2);
  const int theilers[3] = {0, 1, 4};
  long mismatches = 0;
  long queries = 0;
  for (int instance = 0; instance < 1000; ++instance) {
    const Index n = size(rng);
    const Index dim = dims(rng);
    const Metric metric = instance % 2 == 0 ? Metric::MaxNorm : Metric::Euclidean;
    const int theiler = theilers[pick(rng)];
    Matrix p = gaussian(n, dim, rng());
    // Coarse grids create exact distance ties.
    if (instance % 5 == 0) p = (p * 2.0).array().round();
    const NeighborIndex index(p, metric, theiler);
    const int k = std::uniform_int_distribution<int>(1, 10)(rng);
    for (int q = 0; q < 8; ++q) {
      const Index i = std::uniform_int_distribution<Index>(0, n - 1)(rng);
      std::vector<std::pair<double, Index>> all;
      for (Index j = 0; j < n; ++j) {
        const Index gap = i > j ? i - j : j - i;
        if (gap > theiler) all.emplace_back(brute_distance(p, metric, i, j), j);
      }
      if (static_cast<int>(all.size()) < k) continue;
      std::sort(all.begin(), all.end());
      ++queries;
      const KnnResult r = index.knn(i, k);
      bool same = r.distance == all[static_cast<std::size_t>(k - 1)].first;
      for (int m = 0; m < k; ++m) same = same && r.indices[m] == all[static_cast<std::size_t>(m)].second;
      for (double radius : {all[0].first, all[static_cast<std::size_t>(k - 1)].first,
                            0.5 * all[static_cast<std::size_t>(k - 1)].first + 0.25, 0.0}) {
        const Index expect = std::count_if(all.begin(), all.end(),
                                           [&](const auto& e) { return e.first < radius; });
        same = same && index.range_count(i, radius) == expect;
      }
      mismatches += !same;
    }
  }
  const double t = seconds_since(start);
  out.detail << " queries=" << queries << " mismatches=" << mismatches << " time=" << t << "s";
  out.require(mismatches == 0, "exact agreement");
  out.require(t < 60.0, "runtime under 60 s");
}

// --- 3: Henon length sweep -------------------------------------------------

void henon_length(Outcome& out) {
  const auto start = clock_type::now();
  GridSpec spec;
  spec.model = Model::Henon;
  spec.lengths = {32, 64, 128, 256, 512, 1024};
  spec.couplings = {0.6};
  spec.runs = {{Algorithm::Msr, 1.0, 0.0}};
  spec.realizations = 20;
  spec.seed = 3;
  const GridResult r = grid(spec);
  double prev = -1.0;
  for (const auto& row : r.rows) {
    out.detail << " N=" << row.cell.samples << ":" << row.acc;
    if (row.cell.samples >= 512) out.require(row.acc >= 95.0, "ACC >= 95 at N=" + std::to_string(row.cell.samples));
    if (prev >= 0.0) out.require(row.acc >= prev - 5.0, "non-decreasing at N=" + std::to_string(row.cell.samples));
    out.require(row.failed == 0, "no failed realizations");
    prev = std::max(prev, row.acc);
  }
  const double t = seconds_since(start);
  out.detail << " time=" << t << "s";
  out.require(t < 15 * 60.0, "runtime under 15 min");
}

// --- 4: Henon coupling sweep -----------------------------------------------

void henon_coupling(Outcome& out) {
  const auto start = clock_type::now();
  GridSpec spec;
  spec.model = Model::Henon;
  spec.lengths = {512};
  spec.couplings = {0.2, 0.4, 0.6, 0.8};
  spec.runs = {{Algorithm::Msr, 0.0, 0.0}, {Algorithm::Msr, 0.5, 0.0}, {Algorithm::Msr, 1.0, 0.0}};
  spec.realizations = 20;
  spec.seed = 4;
  const GridResult r = grid(spec);
  for (const auto& row : r.rows) {
    out.detail << " Q=" << row.cell.coupling << "/l=" << row.cell.run.lambda << ":" << row.tnr;
    std::ostringstream what;
    what << "TNR >= 95 at Q=" << row.cell.coupling << " lambda=" << row.cell.run.lambda;
    out.require(row.tnr >= 95.0, what.str());
  }
  const double t = seconds_since(start);
  out.detail << " time=" << t << "s";
  out.require(t < 20 * 60.0, "runtime under 20 min");
}

// --- 5: mixing robustness --------------------------------------------------

void mixing(Outcome& out) {
  const auto start = clock_type::now();
  GridSpec spec;
  spec.model = Model::Ar;
  spec.lengths = {512};
  spec.alphas = {0.1};
  for (double g : {0.0, 0.04, 0.08, 0.12, 0.16, 0.2}) spec.runs.push_back({Algorithm::Msr, 0.5, g});
  spec.realizations = 50;
  spec.seed = 5;
  const GridResult r = grid(spec);
  double at_zero = 0.0, at_004 = 0.0, best = -1.0, best_gamma = 0.0;
  for (const auto& row : r.rows) {
    out.detail << " g=" << row.cell.run.gamma << ":" << row.acc;
    if (row.cell.run.gamma == 0.0) at_zero = row.acc;
    if (std::abs(row.cell.run.gamma - 0.04) < 1e-12) at_004 = row.acc;
    if (row.acc > best) best = row.acc, best_gamma = row.cell.run.gamma;
  }
  out.detail << " best g=" << best_gamma;
  out.require(std::abs(at_004 - 94.2) <= 5.0, "ACC at gamma=0.04 within 5 points of 94.2");
  out.require(best > at_zero, "best gamma beats gamma=0");
  const double t = seconds_since(start);
  out.detail << " time=" << t << "s";
  out.require(t < 30 * 60.0, "runtime under 30 min");
}

// --- 6: execution-time ordering --------------------------------------------

void timing(Outcome& out) {
  set_workers(1);
  GridSpec spec;
  spec.model = Model::Henon;
  spec.lengths = {512};
  spec.couplings = {0.6};
  spec.runs = {{Algorithm::Msr, 1.0, 0.0}, {Algorithm::Msr, 0.0, 0.0}, {Algorithm::Bootstrap, 0.0, 0.0}};
  spec.realizations = 5;
  spec.seed = 6;
  const GridResult r = grid(spec, false);
  set_workers(resolve_workers(std::nullopt));
  const double l1 = r.rows[0].seconds, l0 = r.rows[1].seconds, boot = r.rows[2].seconds;
  out.detail << " msr(l=1)=" << l1 << "s msr(l=0)=" << l0 << "s bootstrap=" << boot
             << "s ratios " << l0 / l1 << "x " << boot / l0 << "x";
  out.require(l0 >= 2.0 * l1, "msr(l=0) at least 2x msr(l=1)");
  out.require(boot >= 2.0 * l0, "bootstrap at least 2x msr(l=0)");
}

// --- 7: bootstrap level ----------------------------------------------------

void bootstrap_level(Outcome& out) {
  const auto start = clock_type::now();
  const int runs = 200;
  const int channels = 5;
  Eigen::MatrixXi hits = Eigen::MatrixXi::Zero(channels, channels);
  int first_accepted = 0;
  NueConfig config;
  config.algorithm = Algorithm::Bootstrap;
  for (int run = 0; run < runs; ++run) {
    SeriesMatrix v = gaussian(channels, 512, 70000 + static_cast<std::uint64_t>(run));
    config.seed = static_cast<std::uint64_t>(run);
    const DependencyResult r = dependency_matrix(MultivariateSeries::unlabeled(v), config);
    hits += r.binary;
    for (const auto& trace : r.traces) first_accepted += trace.records.front().accepted;
    if ((run + 1) % 50 == 0) std::fprintf(stderr, "  %d/%d runs\n", run + 1, runs);
  }
  const double worst = 100.0 * hits.maxCoeff() / runs;
  const double mean = 100.0 * hits.sum() / (runs * channels * (channels - 1.0));
  out.detail << " worst pair=" << worst << "% mean=" << mean << "% first-iteration continue="
             << 100.0 * first_accepted / (runs * channels) << "% time=" << seconds_since(start) << "s";
  out.require(worst <= 10.0, "every source-target false-edge rate <= 10%");
}

// --- 8: property suite -----------------------------------------------------

void properties(Outcome& out) {
  const KsgParams params{10, 0};
  int checks = 0;
  auto check = [&](bool ok, const std::string& what) {
    ++checks;
    out.require(ok, what);
  };

  // digamma recurrence
  double worst = 0.0;
  for (double x = 0.05; x < 200.0; x *= 1.07)
    worst = std::max(worst, std::abs(digamma(x + 1.0) - digamma(x) - 1.0 / x) / (1.0 + std::abs(digamma(x))));
  check(worst < 1e-12, "digamma recurrence");

  // empty conditioning and symmetry
  for (int seed = 0; seed < 5; ++seed) {
    const Matrix g = gaussian(400, 3, 10 + static_cast<std::uint64_t>(seed));
    const Vector y = g.col(0) + 0.5 * g.col(1);
    check(ksg_cmi(y, Vector(g.col(1)), Matrix(400, 0), params) == ksg_mi(y, Matrix(g.col(1)), params),
          "empty conditioning equals MI");
    check(ksg_mi(y, Matrix(g.col(1)), params) == ksg_mi(g.col(1), Matrix(y), params), "MI symmetry");
  }

  // lambda=0 selection sequence equals the CMI sequence
  for (int seed = 0; seed < 3; ++seed) {
    const Simulation sim = henon(300, 0.6, 80 + static_cast<std::uint64_t>(seed));
    NueConfig config;
    const MultivariateSeries prepared = prepare_series(sim.series, config);
    TargetSearch a = make_target_search(prepared, 2, config);
    TargetSearch b = make_target_search(prepared, 2, config);
    bool same = true;
    for (int k = 0; k < 6; ++k) {
      const Selection s = a.select_msr(0.0), c = b.select_cmi();
      same = same && s.pool_index == c.pool_index;
      a.include(s.pool_index, s.msr);
      b.include(c.pool_index);
    }
    check(same, "lambda=0 follows the CMI sequence");
  }

  // determinism, worker independence, embedding validity
  {
    const Simulation sim = henon(256, 0.6, 9);
    NueConfig config;
    config.algorithm = Algorithm::Bootstrap;
    config.dimension = 3;
    config.bootstrap_size = 40;
    config.seed = 17;
    set_workers(1);
    const DependencyResult one = dependency_matrix(sim.series, config);
    set_workers(4);
    const DependencyResult four = dependency_matrix(sim.series, config);
    set_workers(resolve_workers(std::nullopt));
    check(one.cte == four.cte && one.binary == four.binary, "results independent of worker count");
    for (const auto& trace : one.traces) {
      std::set<Candidate> seen(trace.embedding.selected.begin(), trace.embedding.selected.end());
      bool in_pool = seen.size() == trace.embedding.selected.size();
      for (const auto& c : seen) in_pool = in_pool && c.channel >= 0 && c.channel < 5 && c.lag >= 1 && c.lag <= 3;
      check(in_pool, "embedding duplicate-free and inside the pool");
    }
    const NueTrace t1 = run_nue(sim.series, 1, config), t2 = run_nue(sim.series, 1, config);
    check(t1.embedding.realizations == t2.embedding.realizations &&
              t1.embedding.selected == t2.embedding.selected,
          "run_nue reproducible");
  }

  // selection invariant to channel scaling
  {
    const Simulation sim = henon(300, 0.6, 12);
    SeriesMatrix scaled = sim.series.values();
    scaled.row(0) *= 8.0;
    scaled.row(3) *= 0.25;
    NueConfig config;
    config.lambda = 0.0;
    bool same = true;
    for (int target = 0; target < 5; ++target)
      same = same && run_nue(sim.series, target, config).embedding.selected ==
                         run_nue(sim.series.with_values(scaled), target, config).embedding.selected;
    check(same, "scale invariance");
  }

  // detection-rate identities and relabeling invariance
  {
    std::mt19937_64 rng(3);
    const GroundTruth truth = henon(64, 0.6, 1).truth;
    bool ok = true;
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::MatrixXi m(5, 5);
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) m(i, j) = i != j && (rng() & 1);
      const ConfusionCounts c = score(m, truth);
      ok = ok && c.total() == 20 && c.acc() == 100.0 * (c.tp + c.tn) / 20.0 &&
           c.tpr() == 100.0 * c.tp / (c.tp + c.fn) && c.tnr() == 100.0 * c.tn / (c.tn + c.fp);
      std::vector<int> perm{0, 1, 2, 3, 4};
      std::shuffle(perm.begin(), perm.end(), rng);
      Eigen::MatrixXi pm(5, 5);
      GroundTruth pt;
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) pm(perm[i], perm[j]) = m(i, j);
      for (const auto& [s, t] : truth.edges) pt.edges.insert({perm[s], perm[t]});
      const ConfusionCounts d = score(pm, pt);
      ok = ok && c.tp == d.tp && c.tn == d.tn && c.fp == d.fp && c.fn == d.fn;
    }
    check(ok, "detection-rate identities");
  }

  // KDE predictions are convex combinations of the targets
  for (int seed = 0; seed < 5; ++seed) {
    const Matrix g = gaussian(300, 3, 50 + static_cast<std::uint64_t>(seed));
    const Vector y = g.col(0).array().cube();
    const Vector p = kde_predict(y, g.rightCols(2));
    check(p.minCoeff() >= y.minCoeff() && p.maxCoeff() <= y.maxCoeff(), "KDE convex bound");
  }

  // generator determinism and mixing linearity
  check(henon(200, 0.6, 5).series.values() == henon(200, 0.6, 5).series.values() &&
            nonlinear_ar(200, 5).series.values() == nonlinear_ar(200, 5).series.values(),
        "generator determinism");
  {
    SeriesMatrix a = (gaussian(5, 50, 1).array() * 16.0).round() / 16.0;
    SeriesMatrix b = (gaussian(5, 50, 2).array() * 16.0).round() / 16.0;
    const SeriesMatrix lhs = mix(MultivariateSeries::unlabeled(2.0 * a + 0.5 * b), 0.25).values();
    const SeriesMatrix rhs = 2.0 * mix(MultivariateSeries::unlabeled(a), 0.25).values() +
                             0.5 * mix(MultivariateSeries::unlabeled(b), 0.25).values();
    check(lhs == rhs, "mixing linearity");
  }
  out.detail << " checks=" << checks;
}

// --- EEG-style sanity run --------------------------------------------------

void eeg_sanity(Outcome& out) {
  const int channels = 76;
  const int samples = 1000;
  const int warmup = 200;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u;
  std::normal_distribution<double> g;
  Matrix a = Matrix::Zero(channels, channels);
  for (int i = 0; i < channels; ++i)
    for (int j = 0; j < channels; ++j) a(i, j) = u(rng) < 0.03 ? 0.3 : 0.0;
  Matrix x = Matrix::Zero(samples + warmup, channels);
  for (int t = 2; t < samples + warmup; ++t) {
    const Eigen::RowVectorXd drive = x.row(t - 1).array().tanh().matrix() * a;
    for (int c = 0; c < channels; ++c)
      x(t, c) = 0.5 * x(t - 1, c) - 0.2 * x(t - 2, c) + drive[c] + g(rng);
  }
  const MultivariateSeries series =
      MultivariateSeries::unlabeled(x.bottomRows(samples).transpose());

  NueConfig config;
  config.delay = 1;
  config.dimension = 8;
  config.theiler = 4;
  config.lambda = 1.0;
  config.gamma = 0.005;
  const auto start = clock_type::now();
  const DependencyResult r = dependency_matrix(series, config);
  const double t = seconds_since(start);
  const nlohmann::json report = analysis_report(series, config, r);

  bool schema = report["schema_version"] == kReportSchemaVersion && report["cte"].size() == 76 &&
                report["binary"].size() == 76 && report["targets"].size() == 76 &&
                report["information_sent"].size() == 76 && report["config"]["theiler"] == 4;
  bool consistent = true;
  for (int s = 0; s < channels; ++s) {
    consistent = consistent && r.binary(s, s) == 0 && r.cte(s, s) == 0.0;
    for (int tg = 0; tg < channels; ++tg)
      consistent = consistent && (r.binary(s, tg) == 1) == (s != tg && r.traces[tg].embedding.has_channel(s)) &&
                   std::isfinite(r.cte(s, tg));
  }
  int iterations = 0;
  for (const auto& trace : r.traces) iterations += trace.iterations();
  out.detail << " edges=" << r.binary.sum() << " mean iterations=" << iterations / 76.0
             << " time=" << t << "s";
  out.require(schema, "report schema");
  out.require(consistent, "binary matrix consistent with embeddings");
  out.require(t < 30 * 60.0, "runtime under 30 min");
}

struct Criterion {
  int id;
  const char* name;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("acceptance suite");
  std::vector<int> only;
  app.add_option("--criterion", only, "Run only these criteria (9 is the EEG-style sanity run)");
  CLI11_PARSE(app, argc, argv);
  set_workers(resolve_workers(std::nullopt));

  const std::vector<Criterion> all = {
      {1, "Gaussian MI oracle", gaussian_mi},
      {2, "neighbor oracle", neighbor_oracle},
      {3, "Henon length sweep", henon_length},
      {4, "Henon coupling sweep", henon_coupling},
      {5, "mixing robustness", mixing},
      {6, "execution-time ordering", timing},
      {7, "bootstrap level", bootstrap_level},
      {8, "property suite", properties},
      {9, "EEG-style sanity run", eeg_sanity},
  };
  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Outcome out;
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << " [exception: " << e.what() << "]";
    }
    failed += !out.pass;
    std::printf("%s criterion %d (%s):%s\n", out.pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
