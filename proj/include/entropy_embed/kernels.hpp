#pragma once

// Dense pairwise-distance kernels behind the estimators and the greedy
// embedding search. Every candidate evaluated by the search differs from the
// current embedding by one column, so distances over the embedding are kept
// as an N x N matrix and the candidate column is folded in row by row. Adding
// a column never shrinks a distance, so when the rows of the embedding matrix
// are also kept sorted, neighbor searches walk a row in ascending order and
// stop early. Rows are processed in parallel with OpenMP; per-row results are
// reduced serially so the output does not depend on the thread count.

#include <vector>

#include "entropy_embed/neighbors.hpp"

namespace entropy_embed::kernels {

/// Table of psi(k) for k = 1..n+1, indexed by k.
class DigammaTable {
 public:
  explicit DigammaTable(Index n);
  double operator()(Index k) const { return values_[static_cast<std::size_t>(k)]; }
  Index max_argument() const { return static_cast<Index>(values_.size()) - 1; }

 private:
  std::vector<double> values_;
};

/// Symmetric N x N distances over a set of columns: max-norm distances, or
/// squared Euclidean distances for Metric::Euclidean. An empty column set is
/// all zeros.
class PairwiseDistances {
 public:
  struct Ranked {
    double key;
    Index idx;
  };

  PairwiseDistances(Index n, Metric metric);
  static PairwiseDistances from_columns(const Matrix& columns, Metric metric);

  /// Folds in a column; drops the sorted rows.
  void add_column(const double* x);

  /// Sorts every row by (distance, index) so kernels can prune their scans.
  void build_order();
  bool ordered() const { return !order_.empty(); }
  const Ranked* ranked(Index i) const { return order_.data() + i * n_; }

  Index size() const { return n_; }
  Metric metric() const { return metric_; }
  Index columns() const { return columns_; }
  const double* row(Index i) const { return values_.data() + i * n_; }

 private:
  Index n_;
  Metric metric_;
  Index columns_ = 0;
  std::vector<double> values_;
  std::vector<Ranked> order_;
};

/// Row-wise view of distances over `base` plus extra raw columns, combined
/// under the base metric without materializing the matrix. `base` may be null
/// (empty column set).
class RowSource {
 public:
  RowSource(const PairwiseDistances* base, std::vector<const double*> columns, Metric metric);
  explicit RowSource(const PairwiseDistances& base) : RowSource(&base, {}, base.metric()) {}

  /// Returns a pointer to row i, written into `scratch` when it must be computed.
  const double* row(Index i, Index n, double* scratch) const;
  bool empty() const { return base_ == nullptr && columns_.empty(); }
  const PairwiseDistances* base() const { return base_; }
  const std::vector<const double*>& columns() const { return columns_; }
  Metric metric() const { return metric_; }

 private:
  const PairwiseDistances* base_;
  std::vector<const double*> columns_;
  Metric metric_;
};

/// KSG (algorithm 1) conditional mutual information I(A;B|S) in nats.
/// `a` and `b` must already include the S columns; `s` may be null, in which
/// case the plain mutual information formula with psi(N) is used.
/// Throws NotEnoughNeighbors.
double ksg(Index n, const RowSource& a, const RowSource& b, const RowSource* s, int neighbors,
           int theiler, const DigammaTable& psi);

/// Leave-one-out nearest-neighbor regression: the mean of y over the
/// `neighbors` closest admissible rows under `sq_euclid` (squared distances).
Vector nn_predict(Index n, const RowSource& sq_euclid, const double* y, int neighbors,
                  int theiler);

}  // namespace entropy_embed::kernels
