#include "entropy_embed/simgen.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "entropy_embed/error.hpp"

namespace entropy_embed {

namespace {

constexpr int kNodes = 5;
constexpr double kDivergence = 1e6;
constexpr int kMaxRestarts = 100;

std::vector<std::string> default_labels() {
  return {"ch1", "ch2", "ch3", "ch4", "ch5"};
}

}  // namespace

double henon_step(const double* prev1, const double* prev2, int node, double coupling) {
  if (node == 0 || node == kNodes - 1) return 1.4 - prev1[node] * prev1[node] + 0.3 * prev2[node];
  const double driven =
      0.5 * coupling * (prev1[node - 1] + prev1[node + 1]) + (1.0 - coupling) * prev1[node];
  return 1.4 - driven * driven + 0.3 * prev2[node];
}

Simulation henon(int samples, double coupling, std::uint64_t seed) {
  if (samples < 32) throw InvalidArgument("Henon simulation needs N >= 32");
  if (!(coupling >= 0.0 && coupling <= 1.0)) throw InvalidArgument("coupling Q must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> init(0.0, 1.0);
  const int total = kBurnIn + samples;

  for (int attempt = 0; attempt <= kMaxRestarts; ++attempt) {
    std::vector<double> state(static_cast<std::size_t>(total) * kNodes);
    auto at = [&](int t) { return state.data() + static_cast<std::size_t>(t) * kNodes; };
    for (int l = 0; l < kNodes; ++l) {
      at(0)[l] = init(rng);
      at(1)[l] = init(rng);
    }
    bool diverged = false;
    for (int t = 2; t < total && !diverged; ++t) {
      for (int l = 0; l < kNodes; ++l) {
        const double v = henon_step(at(t - 1), at(t - 2), l, coupling);
        if (!std::isfinite(v) || std::abs(v) > kDivergence) diverged = true;
        at(t)[l] = v;
      }
    }
    if (diverged) continue;

    SeriesMatrix values(kNodes, samples);
    for (int t = 0; t < samples; ++t)
      for (int l = 0; l < kNodes; ++l) values(l, t) = at(kBurnIn + t)[l];
    Simulation sim{MultivariateSeries(std::move(values), default_labels()), {}};
    if (coupling > 0.0) {
      for (int l = 1; l < kNodes - 1; ++l) {
        sim.truth.edges.insert({l - 1, l});
        sim.truth.edges.insert({l + 1, l});
      }
    }
    return sim;
  }
  throw Diverged("Henon map diverged after " + std::to_string(kMaxRestarts) + " restarts");
}

SeriesMatrix nonlinear_ar_from_innovations(const SeriesMatrix& innovations, int burn_in) {
  if (innovations.rows() != kNodes) throw ShapeMismatch("AR innovations need 5 rows");
  const Index total = innovations.cols();
  if (burn_in < 0 || burn_in >= total) throw InvalidArgument("burn-in must be shorter than the run");
  const double r2 = std::sqrt(2.0);
  SeriesMatrix y = SeriesMatrix::Zero(kNodes, total);
  auto past = [&](int node, Index t, int lag) { return t - lag >= 0 ? y(node, t - lag) : 0.0; };
  for (Index t = 0; t < total; ++t) {
    const auto& e = innovations;
    y(0, t) = 0.95 * r2 * past(0, t, 1) - 0.9125 * past(0, t, 2) + e(0, t);
    const double y1_2 = past(0, t, 2);
    y(1, t) = 0.5 * y1_2 * y1_2 + e(1, t);
    y(2, t) = -0.4 * past(0, t, 3) + 0.4 * past(1, t, 1) + e(2, t);
    const double y1_1 = past(0, t, 1);
    y(3, t) = -0.5 * y1_1 * y1_1 + 0.25 * r2 * past(3, t, 1) + e(3, t);
    y(4, t) = -0.25 * r2 * past(3, t, 1) + 0.25 * r2 * past(4, t, 2) + e(4, t);
  }
  return y.rightCols(total - burn_in);
}

Simulation nonlinear_ar(int samples, std::uint64_t seed) {
  if (samples < 32) throw InvalidArgument("AR simulation needs N >= 32");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  SeriesMatrix innovations(kNodes, kBurnIn + samples);
  for (Index t = 0; t < innovations.cols(); ++t)
    for (Index l = 0; l < kNodes; ++l) innovations(l, t) = noise(rng);
  Simulation sim{MultivariateSeries(nonlinear_ar_from_innovations(innovations, kBurnIn),
                                    default_labels()),
                 {}};
  sim.truth.edges = {{0, 1}, {0, 2}, {1, 2}, {0, 3}, {3, 4}};
  return sim;
}

Matrix mixing_matrix(double alpha) {
  Matrix a = Matrix::Constant(kNodes, kNodes, alpha);
  a.diagonal().setConstant(1.0 - alpha);
  return a;
}

MultivariateSeries mix(const MultivariateSeries& series, double alpha) {
  if (series.channels() != kNodes) throw ShapeMismatch("mixing is defined for 5 channels");
  if (alpha == 0.0) return series;
  // values() is channels x samples, so Y * A becomes A^T * values.
  SeriesMatrix mixed = mixing_matrix(alpha).transpose() * series.values();
  return series.with_values(std::move(mixed));
}

std::string truth_to_json(const GroundTruth& truth, const MultivariateSeries& series) {
  nlohmann::json j;
  j["channels"] = series.channels();
  j["labels"] = series.labels();
  j["edges"] = nlohmann::json::array();
  for (const auto& [s, t] : truth.edges) j["edges"].push_back({s, t});
  return j.dump(2) + "\n";
}

}  // namespace entropy_embed
