#include "entropy_embed/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "entropy_embed/error.hpp"
#include "entropy_embed/estimators.hpp"

namespace entropy_embed::kernels {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_neighbors(Index n, int neighbors, int theiler) {
  if (neighbors < 1) throw InvalidArgument("neighbor count must be >= 1");
  if (theiler < 0) throw InvalidArgument("Theiler window must be non-negative");
  for (Index i = 0; i < n; ++i) {
    if (admissible_count(n, i, theiler) < neighbors)
      throw NotEnoughNeighbors("point " + std::to_string(i) + " of " + std::to_string(n) +
                               " has fewer than " + std::to_string(neighbors) +
                               " admissible neighbors");
  }
}

// Calls f(j) for every j admissible with respect to row i.
template <class F>
inline void for_admissible(Index n, Index i, int theiler, F&& f) {
  const Index lo = std::max<Index>(0, i - theiler);
  const Index hi = std::min<Index>(n - 1, i + theiler);
  for (Index j = 0; j < lo; ++j) f(j);
  for (Index j = hi + 1; j < n; ++j) f(j);
}

struct Entry {
  double key;
  Index idx;
  bool operator<(const Entry& o) const { return key < o.key || (key == o.key && idx < o.idx); }
};

// The `count` admissible j with the smallest (key(j), j), sorted ascending.
// Entries under the running threshold are buffered and the buffer is cut back
// to `count` with a selection whenever it fills up.
class Smallest {
 public:
  explicit Smallest(int count)
      : count_(count), buffer_(static_cast<std::size_t>(4 * count + kBlock)) {}

  template <class Key>
  const Entry* run_keys(const Key& key, Index n, Index i, int theiler) {
    size_ = 0;
    thr_ = kInf;
    scan(key, 0, std::max<Index>(0, i - theiler));
    scan(key, std::min<Index>(n, i + theiler + 1), n);
    shrink();
    std::sort(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(size_));
    return buffer_.data();
  }

  const Entry* run(const double* r, Index n, Index i, int theiler) {
    return run_keys([r](Index j) { return r[j]; }, n, i, theiler);
  }

 private:
  static constexpr Index kBlock = 8;

  void shrink() {
    const auto keep = static_cast<std::size_t>(count_);
    if (size_ <= keep) return;
    std::nth_element(buffer_.begin(), buffer_.begin() + (count_ - 1),
                     buffer_.begin() + static_cast<std::ptrdiff_t>(size_));
    size_ = keep;
    // Later candidates have larger indices, so a tie with the cut loses.
    thr_ = buffer_[keep - 1].key;
  }

  template <class Key>
  void scan(const Key& key, Index lo, Index hi) {
    const std::size_t cap = buffer_.size() - kBlock;
    Index j = lo;
    double v[kBlock];
    for (; j + kBlock <= hi; j += kBlock) {
      if (size_ >= cap) shrink();
      for (Index k = 0; k < kBlock; ++k) v[k] = key(j + k);
      // Most blocks lie entirely above the threshold.
      double low = v[0];
      for (Index k = 1; k < kBlock; ++k) low = v[k] < low ? v[k] : low;
      if (!(low < thr_)) continue;
      for (Index k = 0; k < kBlock; ++k)
        if (v[k] < thr_) buffer_[size_++] = {v[k], j + k};
    }
    for (; j < hi; ++j) {
      if (size_ >= cap) shrink();
      const double x = key(j);
      if (x < thr_) buffer_[size_++] = {x, j};
    }
  }

  int count_;
  std::vector<Entry> buffer_;
  std::size_t size_ = 0;
  double thr_ = kInf;
};

// Bounded sorted list of the best (key, idx) entries offered in any order.
class Nearest {
 public:
  explicit Nearest(int count) : count_(count), top_(static_cast<std::size_t>(count)) {}

  void clear() { size_ = 0; }
  bool full() const { return size_ == count_; }
  const Entry& worst() const { return top_[static_cast<std::size_t>(count_ - 1)]; }
  const Entry* data() const { return top_.data(); }

  void offer(double key, Index j) {
    const Entry e{key, j};
    int p;
    if (size_ == count_) {
      if (!(e < worst())) return;
      p = count_ - 1;
    } else {
      p = size_++;
    }
    while (p > 0 && e < top_[static_cast<std::size_t>(p - 1)]) {
      top_[static_cast<std::size_t>(p)] = top_[static_cast<std::size_t>(p - 1)];
      --p;
    }
    top_[static_cast<std::size_t>(p)] = e;
  }

 private:
  int count_;
  int size_ = 0;
  std::vector<Entry> top_;
};

inline bool admissible_pair(Index i, Index j, int theiler) {
  return j < i - theiler || j > i + theiler;
}

// Distance between rows i and j under `src`, given the base entry `v`. The
// arithmetic matches RowSource::row exactly.
inline double fold(const RowSource& src, double v, Index i, Index j) {
  const bool max_norm = src.metric() == Metric::MaxNorm;
  for (const double* x : src.columns()) {
    const double t = x[i] - x[j];
    v = max_norm ? std::max(v, std::abs(t)) : v + t * t;
  }
  return v;
}

inline double value(const RowSource& src, Index i, Index j) {
  return fold(src, src.base() ? src.base()->row(i)[j] : 0.0, i, j);
}

inline bool sorted_base(const RowSource& src) { return src.base() && src.base()->ordered(); }

// Admissible j with distance strictly below eps.
Index count_below(const RowSource& src, Index n, Index i, int theiler, double eps,
                  double* scratch) {
  Index count = 0;
  if (sorted_base(src)) {
    const PairwiseDistances::Ranked* r = src.base()->ranked(i);
    if (src.columns().empty()) {
      count = std::partition_point(r, r + n, [eps](const auto& e) { return e.key < eps; }) - r;
      const double* row = src.base()->row(i);
      for (Index j = std::max<Index>(0, i - theiler); j <= std::min<Index>(n - 1, i + theiler); ++j)
        count -= row[j] < eps;
      return count;
    }
    for (Index k = 0; k < n && r[k].key < eps; ++k) {
      const Index j = r[k].idx;
      count += admissible_pair(i, j, theiler) && fold(src, r[k].key, i, j) < eps;
    }
    return count;
  }
  const double* row = src.row(i, n, scratch);
  for_admissible(n, i, theiler, [&](Index j) { count += row[j] < eps; });
  return count;
}

}  // namespace

DigammaTable::DigammaTable(Index n) : values_(static_cast<std::size_t>(n) + 2, 0.0) {
  for (std::size_t k = 1; k < values_.size(); ++k) values_[k] = digamma(static_cast<double>(k));
}

PairwiseDistances::PairwiseDistances(Index n, Metric metric)
    : n_(n), metric_(metric), values_(static_cast<std::size_t>(n * n), 0.0) {}

PairwiseDistances PairwiseDistances::from_columns(const Matrix& columns, Metric metric) {
  PairwiseDistances out(columns.rows(), metric);
  for (Index c = 0; c < columns.cols(); ++c) out.add_column(columns.col(c).data());
  return out;
}

void PairwiseDistances::add_column(const double* x) {
  const Index n = n_;
  double* v = values_.data();
  if (metric_ == Metric::MaxNorm) {
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
      double* r = v + i * n;
      const double xi = x[i];
      for (Index j = 0; j < n; ++j) r[j] = std::max(r[j], std::abs(xi - x[j]));
    }
  } else {
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
      double* r = v + i * n;
      const double xi = x[i];
      for (Index j = 0; j < n; ++j) {
        const double t = xi - x[j];
        r[j] += t * t;
      }
    }
  }
  ++columns_;
  order_.clear();
}

void PairwiseDistances::build_order() {
  if (ordered()) return;
  const Index n = n_;
  order_.resize(static_cast<std::size_t>(n * n));
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    const double* r = row(i);
    Ranked* o = order_.data() + i * n;
    for (Index j = 0; j < n; ++j) o[j] = {r[j], j};
    std::sort(o, o + n, [](const Ranked& a, const Ranked& b) {
      return a.key < b.key || (a.key == b.key && a.idx < b.idx);
    });
  }
}

RowSource::RowSource(const PairwiseDistances* base, std::vector<const double*> columns,
                     Metric metric)
    : base_(base), columns_(std::move(columns)), metric_(metric) {
  if (base_ && base_->metric() != metric_)
    throw InvalidArgument("row source metric differs from its base matrix");
}

const double* RowSource::row(Index i, Index n, double* scratch) const {
  if (columns_.empty()) {
    if (base_) return base_->row(i);
    std::fill(scratch, scratch + n, 0.0);
    return scratch;
  }
  const bool max_norm = metric_ == Metric::MaxNorm;
  const double* x = columns_.front();
  const double xi = x[i];
  // The first column is folded in while copying the base row.
  if (base_) {
    const double* b = base_->row(i);
    if (max_norm) {
      for (Index j = 0; j < n; ++j) scratch[j] = std::max(b[j], std::abs(xi - x[j]));
    } else {
      for (Index j = 0; j < n; ++j) {
        const double t = xi - x[j];
        scratch[j] = b[j] + t * t;
      }
    }
  } else if (max_norm) {
    for (Index j = 0; j < n; ++j) scratch[j] = std::abs(xi - x[j]);
  } else {
    for (Index j = 0; j < n; ++j) {
      const double t = xi - x[j];
      scratch[j] = t * t;
    }
  }
  for (std::size_t c = 1; c < columns_.size(); ++c) {
    const double* xc = columns_[c];
    const double xci = xc[i];
    if (max_norm) {
      for (Index j = 0; j < n; ++j) scratch[j] = std::max(scratch[j], std::abs(xci - xc[j]));
    } else {
      for (Index j = 0; j < n; ++j) {
        const double t = xci - xc[j];
        scratch[j] += t * t;
      }
    }
  }
  return scratch;
}

double ksg(Index n, const RowSource& a, const RowSource& b, const RowSource* s, int neighbors,
           int theiler, const DigammaTable& psi) {
  require_neighbors(n, neighbors, theiler);
  if (psi.max_argument() < n) throw InvalidArgument("digamma table too small");
  if (s && s->empty()) s = nullptr;
  std::vector<double> terms(static_cast<std::size_t>(n));
  // The joint distance is bounded below by either marginal's base distance.
  const RowSource* lead = sorted_base(a) ? &a : sorted_base(b) ? &b : nullptr;
  const RowSource* other = lead == &a ? &b : &a;

#pragma omp parallel
  {
    std::vector<double> sa(n), sb(n), ss(n), sj(n);
    Smallest select(neighbors);
    Nearest nearest(neighbors);
#pragma omp for schedule(static)
    for (Index i = 0; i < n; ++i) {
      double eps;
      if (lead) {
        const PairwiseDistances::Ranked* r = lead->base()->ranked(i);
        nearest.clear();
        for (Index k = 0; k < n; ++k) {
          if (nearest.full() && r[k].key > nearest.worst().key) break;
          const Index j = r[k].idx;
          if (!admissible_pair(i, j, theiler)) continue;
          nearest.offer(std::max(fold(*lead, r[k].key, i, j), value(*other, i, j)), j);
        }
        eps = nearest.worst().key;
      } else {
        const double* ra = a.row(i, n, sa.data());
        const double* rb = b.row(i, n, sb.data());
        for (Index j = 0; j < n; ++j) sj[j] = std::max(ra[j], rb[j]);
        eps = select.run(sj.data(), n, i, theiler)[neighbors - 1].key;
      }
      const Index na = count_below(a, n, i, theiler, eps, sa.data());
      const Index nb = count_below(b, n, i, theiler, eps, sb.data());
      if (s) {
        const Index ns = count_below(*s, n, i, theiler, eps, ss.data());
        terms[i] = psi(ns + 1) - psi(na + 1) - psi(nb + 1);
      } else {
        terms[i] = psi(na + 1) + psi(nb + 1);
      }
    }
  }

  double sum = 0.0;
  for (double t : terms) sum += t;
  const double mean = sum / static_cast<double>(n);
  return s ? psi(neighbors) + mean : psi(neighbors) + psi(n) - mean;
}

Vector nn_predict(Index n, const RowSource& sq_euclid, const double* y, int neighbors,
                  int theiler) {
  require_neighbors(n, neighbors, theiler);
  Vector out(n);
  const bool pruned = sorted_base(sq_euclid);
  // A lone column is searched outward from each point's rank.
  const bool line = !sq_euclid.base() && sq_euclid.columns().size() == 1;
  std::vector<Index> by_value, rank;
  if (line) {
    const double* x = sq_euclid.columns().front();
    by_value.resize(static_cast<std::size_t>(n));
    rank.resize(static_cast<std::size_t>(n));
    std::iota(by_value.begin(), by_value.end(), Index{0});
    std::sort(by_value.begin(), by_value.end(),
              [x](Index p, Index q) { return x[p] < x[q] || (x[p] == x[q] && p < q); });
    for (Index k = 0; k < n; ++k) rank[static_cast<std::size_t>(by_value[k])] = k;
  }
#pragma omp parallel
  {
    std::vector<double> scratch(n);
    Smallest select(neighbors);
    Nearest nearest(neighbors);
#pragma omp for schedule(static)
    for (Index i = 0; i < n; ++i) {
      const Entry* best;
      if (pruned) {
        const PairwiseDistances::Ranked* r = sq_euclid.base()->ranked(i);
        nearest.clear();
        for (Index k = 0; k < n; ++k) {
          if (nearest.full() && r[k].key > nearest.worst().key) break;
          const Index j = r[k].idx;
          if (admissible_pair(i, j, theiler)) nearest.offer(fold(sq_euclid, r[k].key, i, j), j);
        }
        best = nearest.data();
      } else if (line) {
        const double* x = sq_euclid.columns().front();
        const double xi = x[i];
        auto key = [&](Index k) {
          const double t = xi - x[by_value[static_cast<std::size_t>(k)]];
          return t * t;
        };
        nearest.clear();
        // Keys grow monotonically away from i in either direction.
        Index lo = rank[static_cast<std::size_t>(i)] - 1, hi = lo + 2;
        while (lo >= 0 || hi < n) {
          const double kl = lo >= 0 ? key(lo) : kInf;
          const double kh = hi < n ? key(hi) : kInf;
          const bool left = kl <= kh;
          const double v = left ? kl : kh;
          if (nearest.full() && v > nearest.worst().key) break;
          const Index j = by_value[static_cast<std::size_t>(left ? lo-- : hi++)];
          if (admissible_pair(i, j, theiler)) nearest.offer(v, j);
        }
        best = nearest.data();
      } else {
        best = select.run(sq_euclid.row(i, n, scratch.data()), n, i, theiler);
      }
      double sum = 0.0;
      for (int k = 0; k < neighbors; ++k) sum += y[best[k].idx];
      out[i] = sum / static_cast<double>(neighbors);
    }
  }
  return out;
}

}  // namespace entropy_embed::kernels
