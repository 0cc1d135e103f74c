#pragma once

#include <cstdint>
#include <vector>

#include "entropy_embed/series.hpp"

namespace entropy_embed {

enum class Metric { MaxNorm, Euclidean };

struct KnnResult {
  /// Neighbors ordered by (distance, index).
  std::vector<Index> indices;
  /// Distance to the last returned neighbor.
  double distance = 0.0;
};

/// True when j may be returned for query i: j != i and |i - j| > theiler.
inline bool admissible(Index i, Index j, int theiler) {
  const Index gap = i > j ? i - j : j - i;
  return gap > theiler;
}

/// Number of admissible neighbors of point i among n points.
Index admissible_count(Index n, Index i, int theiler);

/// Static k-d tree over the rows of a realization matrix. Queries exclude the
/// query point itself and every index within the Theiler window; ties are
/// broken by the smaller index. Immutable after construction, so concurrent
/// queries are safe.
class NeighborIndex {
 public:
  NeighborIndex(const Matrix& points, Metric metric, int theiler = 0);

  Index size() const { return n_; }
  Index dim() const { return dim_; }
  Metric metric() const { return metric_; }
  int theiler() const { return theiler_; }

  /// The `count` admissible points closest to point i. Throws NotEnoughNeighbors.
  KnnResult knn(Index i, int count) const;

  /// Admissible points at distance strictly less than `radius` from point i.
  Index range_count(Index i, double radius) const;

 private:
  struct Node {
    Index begin = 0;
    Index end = 0;
    int left = -1;
    int right = -1;
  };

  int build(Index begin, Index end);
  double lower_bound(int node, const double* q) const;
  double key(const double* a, const double* b) const;
  void search_knn(int node, Index i, const double* q, std::size_t count,
                  std::vector<std::pair<double, Index>>& best) const;
  Index search_range(int node, Index i, const double* q, double key_radius) const;
  const double* point(Index i) const { return data_.data() + i * dim_; }

  Index n_ = 0;
  Index dim_ = 0;
  Metric metric_;
  int theiler_ = 0;
  std::vector<double> data_;  // row-major copy of the points
  std::vector<Index> order_;  // leaf order of point indices
  std::vector<Node> nodes_;
  std::vector<double> box_lo_;
  std::vector<double> box_hi_;
};

/// Brute-force O(N) per query scans with the same contract as NeighborIndex.
/// Kept as the reference the tree and the pairwise kernels are checked against.
namespace linear_scan {

KnnResult knn(const Matrix& points, Metric metric, int theiler, Index i, int count);
Index range_count(const Matrix& points, Metric metric, int theiler, Index i, double radius);

}  // namespace linear_scan

/// Adds i.i.d. uniform noise in [-amplitude, amplitude] to every entry.
Matrix jitter(const Matrix& points, double amplitude, std::uint64_t seed);

}  // namespace entropy_embed
