#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "entropy_embed/estimators.hpp"
#include "entropy_embed/kernels.hpp"
#include "entropy_embed/series.hpp"

namespace entropy_embed {

/// Greedy non-uniform embedding variants.
///  - Bootstrap: CMI ranking, permutation-surrogate termination.
///  - La: low-dimensional CMI approximation for ranking and surrogates.
///  - Aic: CMI ranking, AIC of kernel regression for termination.
///  - Msr: (1-lambda) CMI - lambda MSR ranking, MSR-improvement termination.
enum class Algorithm { Bootstrap, La, Aic, Msr };

std::string to_string(Algorithm algorithm);
/// Accepts "bootstrap", "la", "aic", "msr"; throws InvalidArgument.
Algorithm parse_algorithm(const std::string& name);

/// Direction of the AIC acceptance test.
enum class AicRule {
  IncludeOnDecrease,  ///< accept when AIC_k < AIC_{k-1}
  IncludeOnIncrease,  ///< accept when AIC_k > AIC_{k-1}
};

struct NueConfig {
  Algorithm algorithm = Algorithm::Msr;
  int delay = 1;           ///< m
  int dimension = 5;       ///< d
  int neighbors = 10;      ///< T
  double lambda = 0.5;
  double gamma = 0.0;
  int bootstrap_size = 100;
  double percentile = 95.0;
  int theiler = 0;
  int max_iterations = 0;  ///< 0 means L * d
  std::uint64_t seed = 0;
  AicRule aic_rule = AicRule::IncludeOnDecrease;
  /// Uniform jitter amplitude relative to the (unit) channel deviation.
  double jitter = 1e-10;

  /// Throws InvalidArgument on out-of-range parameters.
  void validate() const;
  KsgParams ksg() const { return {neighbors, theiler}; }
};

enum class Decision { Continue, Stop };

struct IterationRecord {
  Candidate candidate;
  double criterion = 0.0;    ///< selection score of the winner
  double termination = 0.0;  ///< test statistic: MSR drop, surrogate percentile, or AIC_k
  double msr = 0.0;          ///< MSR with the winner added (NaN when not evaluated)
  bool accepted = false;
};

struct NueTrace {
  std::vector<IterationRecord> records;
  EmbeddingState embedding;
  /// MSR of the empty embedding (unit variance of the normalized target).
  double initial_msr = 1.0;

  int iterations() const { return static_cast<int>(records.size()); }
};

struct Selection {
  Index pool_index = -1;
  double value = 0.0;
  double msr = 0.0;  ///< NaN unless the selection evaluated it
};

/// Incremental search state for one target: the lagged target, every pool
/// column, and pairwise distances over the current embedding S.
class TargetSearch {
 public:
  TargetSearch(Vector y, Matrix columns, std::vector<Candidate> pool, KsgParams params);

  Index rows() const { return y_.rows(); }
  const Vector& target() const { return y_; }
  const std::vector<Candidate>& pool() const { return pool_; }
  const std::vector<Index>& selected() const { return selected_; }
  bool is_selected(Index c) const { return in_s_[static_cast<std::size_t>(c)]; }
  Index remaining() const { return static_cast<Index>(pool_.size() - selected_.size()); }

  /// Moves pool column c into S. `known_msr` is MSR(Y | S + W_c) when the
  /// caller already has it; otherwise it is recomputed on demand.
  void include(Index c, double known_msr = std::numeric_limits<double>::quiet_NaN());
  EmbeddingState state() const;
  /// Columns of S in selection order, followed by column `extra` if >= 0.
  Matrix embedding_matrix(Index extra = -1) const;

  /// I(Y; W_c | S).
  double cmi(Index c) const;
  /// I(W_c;Y) - 2/|S| sum I(W_c;W_j) + 2/|S| sum I(W_c;W_j|Y); plain MI for empty S.
  double la_score(Index c);
  /// MSR of nearest-neighbor prediction of Y from S plus W_c.
  double msr_with(Index c) const;
  /// MSR from S; 1 (the normalized target variance) for an empty S.
  double msr_current() const;
  /// AIC of kernel regression of Y on S plus W_c (S alone when c < 0).
  double aic_with(Index c) const;

  /// Argmax of cmi over unselected columns; ties go to the first in pool order.
  Selection select_cmi() const;
  Selection select_la();
  /// Argmax of (1-lambda) cmi - lambda msr_with. CMI is skipped at lambda=1;
  /// at lambda=0 only the winner's MSR is computed.
  Selection select_msr(double lambda) const;

  /// Surrogate scores from independent row permutations of Y and W_c with S
  /// held fixed; `la` selects the LA score instead of the CMI.
  std::vector<double> surrogates(Index c, bool la, int count, std::mt19937_64& rng);

 private:
  void order_for_cmi() const;
  void order_for_msr() const;

  const double* column(Index c) const { return columns_.col(c).data(); }
  double la_score_for(const double* w, const double* y, Index c);

  Vector y_;
  Matrix columns_;
  std::vector<Candidate> pool_;
  KsgParams params_;
  kernels::DigammaTable psi_;
  std::vector<Index> selected_;
  std::vector<bool> in_s_;
  // Row orders are built lazily before candidate loops.
  mutable kernels::PairwiseDistances dist_s_;   // max-norm over S
  mutable kernels::PairwiseDistances dist_ys_;  // max-norm over [Y, S]
  mutable kernels::PairwiseDistances dist_y_;   // max-norm over Y
  mutable kernels::PairwiseDistances sq_s_;     // squared Euclidean over S
  mutable double msr_current_ = 1.0;
  std::vector<double> mi_y_;          // I(W_c;Y), lazily filled
  std::vector<double> mi_pair_;       // I(W_c;W_j), P x P
  std::vector<double> cmi_pair_y_;    // I(W_c;W_j|Y), P x P
};

/// Value at the given percentile of the sorted surrogates: the
/// ceil(p/100 * B)-th smallest.
double surrogate_percentile(std::vector<double> values, double percentile);

/// Continue iff the candidate value exceeds the surrogate percentile.
Decision bootstrap_terminate(double value, const std::vector<double>& surrogates,
                             double percentile);

/// Continue iff msr_prev - msr_new > gamma.
Decision msr_terminate(double msr_prev, double msr_new, double gamma);

/// Compares AIC of kernel regression on u_k against u_{k-1}. Stops when u_k
/// adds no column.
Decision aic_terminate(const Vector& y, const Matrix& u_k, const Matrix& u_k_minus_1,
                       AicRule rule = AicRule::IncludeOnDecrease);

/// Normalizes every channel and applies the configured jitter.
MultivariateSeries prepare_series(const MultivariateSeries& series, const NueConfig& config);

/// Builds the search for `target` over the full candidate pool of `prepared`.
TargetSearch make_target_search(const MultivariateSeries& prepared, int target,
                                const NueConfig& config);

/// Greedy embedding of one target on already prepared data.
NueTrace run_nue_prepared(const MultivariateSeries& prepared, int target, const NueConfig& config);

/// prepare_series followed by run_nue_prepared.
NueTrace run_nue(const MultivariateSeries& series, int target, const NueConfig& config);

struct DependencyResult {
  Matrix cte;                     ///< [source][target], nats
  Eigen::MatrixXi binary;         ///< [source][target]
  std::vector<NueTrace> traces;   ///< per target
  std::vector<double> seconds;    ///< per-target wall clock of the embedding search
  double total_seconds = 0.0;
};

/// One embedding search per target, then CTE for every source found in the
/// target's embedding. Targets run in parallel; results do not depend on the
/// worker count.
DependencyResult dependency_matrix(const MultivariateSeries& series, const NueConfig& config);

}  // namespace entropy_embed
