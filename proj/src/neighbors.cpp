#include "entropy_embed/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "entropy_embed/error.hpp"

namespace entropy_embed {

namespace {

constexpr Index kLeafSize = 12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Comparison key: max-norm distance, or squared Euclidean distance.
template <class Get>
double distance_key(Metric metric, Index dim, Get&& diff) {
  double acc = 0.0;
  if (metric == Metric::MaxNorm) {
    for (Index d = 0; d < dim; ++d) acc = std::max(acc, std::abs(diff(d)));
  } else {
    for (Index d = 0; d < dim; ++d) {
      const double t = diff(d);
      acc += t * t;
    }
  }
  return acc;
}

double key_to_distance(Metric metric, double key) {
  return metric == Metric::MaxNorm ? key : std::sqrt(key);
}

void insert_best(std::vector<std::pair<double, Index>>& best, std::size_t count, double key,
                 Index j) {
  const std::pair<double, Index> item{key, j};
  if (best.size() == count && !(item < best.back())) return;
  best.insert(std::upper_bound(best.begin(), best.end(), item), item);
  if (best.size() > count) best.pop_back();
}

void require_neighbors(Index n, Index i, int theiler, int count) {
  if (count < 1) throw InvalidArgument("neighbor count must be >= 1");
  if (i < 0 || i >= n) throw InvalidArgument("query index out of range");
  if (admissible_count(n, i, theiler) < count)
    throw NotEnoughNeighbors("point " + std::to_string(i) + " has fewer than " +
                             std::to_string(count) + " admissible neighbors");
}

}  // namespace

Index admissible_count(Index n, Index i, int theiler) {
  const Index lo = std::max<Index>(0, i - theiler);
  const Index hi = std::min<Index>(n - 1, i + theiler);
  return n - (hi - lo + 1);
}

NeighborIndex::NeighborIndex(const Matrix& points, Metric metric, int theiler)
    : n_(points.rows()), dim_(points.cols()), metric_(metric), theiler_(theiler) {
  if (dim_ < 1) throw InvalidArgument("neighbor index needs at least one dimension");
  if (theiler < 0) throw InvalidArgument("Theiler window must be non-negative");
  if (!points.allFinite()) throw InvalidArgument("neighbor index points must be finite");
  data_.resize(static_cast<std::size_t>(n_ * dim_));
  for (Index i = 0; i < n_; ++i)
    for (Index d = 0; d < dim_; ++d) data_[i * dim_ + d] = points(i, d);
  order_.resize(static_cast<std::size_t>(n_));
  std::iota(order_.begin(), order_.end(), Index{0});
  if (n_ > 0) build(0, n_);
}

int NeighborIndex::build(Index begin, Index end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end, -1, -1});
  box_lo_.resize(box_lo_.size() + dim_, kInf);
  box_hi_.resize(box_hi_.size() + dim_, -kInf);
  double* lo = box_lo_.data() + id * dim_;
  double* hi = box_hi_.data() + id * dim_;
  for (Index k = begin; k < end; ++k) {
    const double* p = point(order_[k]);
    for (Index d = 0; d < dim_; ++d) {
      lo[d] = std::min(lo[d], p[d]);
      hi[d] = std::max(hi[d], p[d]);
    }
  }
  if (end - begin <= kLeafSize) return id;

  Index split = 0;
  double widest = -1.0;
  for (Index d = 0; d < dim_; ++d) {
    if (hi[d] - lo[d] > widest) {
      widest = hi[d] - lo[d];
      split = d;
    }
  }
  if (widest <= 0.0) return id;  // all points identical

  const Index mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](Index a, Index b) { return point(a)[split] < point(b)[split]; });
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

double NeighborIndex::key(const double* a, const double* b) const {
  return distance_key(metric_, dim_, [&](Index d) { return a[d] - b[d]; });
}

double NeighborIndex::lower_bound(int node, const double* q) const {
  const double* lo = box_lo_.data() + node * dim_;
  const double* hi = box_hi_.data() + node * dim_;
  return distance_key(metric_, dim_, [&](Index d) {
    if (q[d] < lo[d]) return lo[d] - q[d];
    if (q[d] > hi[d]) return q[d] - hi[d];
    return 0.0;
  });
}

void NeighborIndex::search_knn(int node, Index i, const double* q, std::size_t count,
                               std::vector<std::pair<double, Index>>& best) const {
  const Node& nd = nodes_[node];
  if (nd.left < 0) {
    for (Index k = nd.begin; k < nd.end; ++k) {
      const Index j = order_[k];
      if (!admissible(i, j, theiler_)) continue;
      insert_best(best, count, key(q, point(j)), j);
    }
    return;
  }
  const double bl = lower_bound(nd.left, q);
  const double br = lower_bound(nd.right, q);
  const int first = bl <= br ? nd.left : nd.right;
  const int second = bl <= br ? nd.right : nd.left;
  const double b1 = std::min(bl, br);
  const double b2 = std::max(bl, br);
  // A node whose bound equals the current worst may still hold a tie with a
  // smaller index, so only strictly larger bounds are pruned.
  if (best.size() < count || b1 <= best.back().first) search_knn(first, i, q, count, best);
  if (best.size() < count || b2 <= best.back().first) search_knn(second, i, q, count, best);
}

KnnResult NeighborIndex::knn(Index i, int count) const {
  require_neighbors(n_, i, theiler_, count);
  std::vector<std::pair<double, Index>> best;
  best.reserve(static_cast<std::size_t>(count) + 1);
  search_knn(0, i, point(i), static_cast<std::size_t>(count), best);
  KnnResult out;
  for (const auto& [k, j] : best) out.indices.push_back(j);
  out.distance = key_to_distance(metric_, best.back().first);
  return out;
}

Index NeighborIndex::search_range(int node, Index i, const double* q, double radius) const {
  if (!(key_to_distance(metric_, lower_bound(node, q)) < radius)) return 0;
  const Node& nd = nodes_[node];
  if (nd.left >= 0)
    return search_range(nd.left, i, q, radius) + search_range(nd.right, i, q, radius);
  Index count = 0;
  for (Index k = nd.begin; k < nd.end; ++k) {
    const Index j = order_[k];
    if (admissible(i, j, theiler_) && key_to_distance(metric_, key(q, point(j))) < radius) ++count;
  }
  return count;
}

Index NeighborIndex::range_count(Index i, double radius) const {
  if (i < 0 || i >= n_) throw InvalidArgument("query index out of range");
  if (n_ == 0) return 0;
  return search_range(0, i, point(i), radius);
}

namespace linear_scan {

KnnResult knn(const Matrix& points, Metric metric, int theiler, Index i, int count) {
  const Index n = points.rows();
  require_neighbors(n, i, theiler, count);
  std::vector<std::pair<double, Index>> all;
  for (Index j = 0; j < n; ++j) {
    if (!admissible(i, j, theiler)) continue;
    all.emplace_back(
        distance_key(metric, points.cols(), [&](Index d) { return points(i, d) - points(j, d); }),
        j);
  }
  std::sort(all.begin(), all.end());
  KnnResult out;
  for (int k = 0; k < count; ++k) out.indices.push_back(all[k].second);
  out.distance = key_to_distance(metric, all[count - 1].first);
  return out;
}

Index range_count(const Matrix& points, Metric metric, int theiler, Index i, double radius) {
  Index count = 0;
  for (Index j = 0; j < points.rows(); ++j) {
    if (!admissible(i, j, theiler)) continue;
    const double k =
        distance_key(metric, points.cols(), [&](Index d) { return points(i, d) - points(j, d); });
    if (key_to_distance(metric, k) < radius) ++count;
  }
  return count;
}

}  // namespace linear_scan

Matrix jitter(const Matrix& points, double amplitude, std::uint64_t seed) {
  if (!(amplitude >= 0.0)) throw InvalidArgument("jitter amplitude must be non-negative");
  if (amplitude == 0.0) return points;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(-amplitude, amplitude);
  Matrix out = points;
  for (Index c = 0; c < out.cols(); ++c)
    for (Index r = 0; r < out.rows(); ++r) out(r, c) += noise(rng);
  return out;
}

}  // namespace entropy_embed
