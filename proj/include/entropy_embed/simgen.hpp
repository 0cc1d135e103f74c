#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>

#include "entropy_embed/series.hpp"

namespace entropy_embed {

/// Directed (source, target) channel pairs, zero-based.
struct GroundTruth {
  std::set<std::pair<int, int>> edges;

  bool has_edge(int source, int target) const { return edges.count({source, target}) > 0; }
};

struct Simulation {
  MultivariateSeries series;
  GroundTruth truth;
};

constexpr int kBurnIn = 1000;

/// One step of node l (zero-based) of the 5-node coupled Henon chain given
/// the two previous states of all nodes.
double henon_step(const double* prev1, const double* prev2, int node, double coupling);

/// 5-node Henon chain with coupling Q; nodes 0 and 4 are autonomous and
/// nodes 1..3 are driven by both neighbors. Random initial states in [0,1),
/// 1000 burn-in samples, restarts on divergence (|y| > 1e6, at most 100).
Simulation henon(int samples, double coupling, std::uint64_t seed);

/// 5-channel nonlinear autoregressive network with unit Gaussian innovations
/// and 1000 burn-in samples.
Simulation nonlinear_ar(int samples, std::uint64_t seed);

/// The AR recursion driven by explicit innovations [5 x (burn-in + N)] from
/// a zero initial state; the first `burn_in` samples are dropped.
SeriesMatrix nonlinear_ar_from_innovations(const SeriesMatrix& innovations, int burn_in);

/// The 5x5 mixing matrix with 1-alpha on the diagonal and alpha elsewhere.
Matrix mixing_matrix(double alpha);

/// Instantaneous mixing Y * A (samples as rows). alpha = 0 is the identity.
MultivariateSeries mix(const MultivariateSeries& series, double alpha);

/// Ground truth as {"edges": [[source, target], ...], "channels": L} with
/// zero-based indices and labels.
std::string truth_to_json(const GroundTruth& truth, const MultivariateSeries& series);

}  // namespace entropy_embed
