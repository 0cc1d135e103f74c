#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "entropy_embed/error.hpp"
#include "entropy_embed/neighbors.hpp"
#include "helpers.hpp"

using namespace entropy_embed;

namespace {

Matrix column(std::initializer_list<double> xs) {
  Matrix m(static_cast<Index>(xs.size()), 1);
  Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return m;
}

}  // namespace

TEST_CASE("knn hand examples") {
  const Matrix p = column({0, 1, 2, 10});
  for (Metric metric : {Metric::MaxNorm, Metric::Euclidean}) {
    const NeighborIndex idx(p, metric, 0);
    const auto r = idx.knn(0, 2);
    CHECK(r.indices == std::vector<Index>{1, 2});
    CHECK(r.distance == 2.0);

    const NeighborIndex wide(p, metric, 1);
    const auto w = wide.knn(0, 2);
    CHECK(w.indices == std::vector<Index>{2, 3});
    CHECK(w.distance == 10.0);

    CHECK_THROWS_AS(idx.knn(0, 4), NotEnoughNeighbors);
    CHECK_THROWS_AS(linear_scan::knn(p, metric, 0, 0, 4), NotEnoughNeighbors);
  }
}

TEST_CASE("range count hand examples") {
  const Matrix p = column({0, 0.4, 0.5, 1});
  const NeighborIndex idx(p, Metric::MaxNorm, 0);
  CHECK(idx.range_count(0, 0.5) == 1);
  CHECK(idx.range_count(0, 1e-30) == 0);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(idx.range_count(0, inf) == 3);
  CHECK(NeighborIndex(p, Metric::MaxNorm, 1).range_count(1, inf) == 1);
  CHECK(admissible_count(4, 1, 1) == 1);
}

TEST_CASE("ties go to the smaller index") {
  // Many exact duplicates and equal distances.
  Matrix p(9, 2);
  p << 0, 0, 1, 0, 0, 1, -1, 0, 0, -1, 1, 0, 0, 0, 2, 2, -1, 0;
  for (Metric metric : {Metric::MaxNorm, Metric::Euclidean}) {
    const NeighborIndex idx(p, metric, 0);
    const auto r = idx.knn(0, 3);
    CHECK(r.indices == std::vector<Index>{6, 1, 2});
    for (Index i = 0; i < p.rows(); ++i)
      for (int t = 1; t <= 8; ++t)
        CHECK(idx.knn(i, t).indices == linear_scan::knn(p, metric, 0, i, t).indices);
  }
}

TEST_CASE("k-d tree agrees with the linear scan") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 150; ++trial) {
    const Index n = std::uniform_int_distribution<Index>(12, 300)(rng);
    const Index dim = std::uniform_int_distribution<Index>(1, 6)(rng);
    const int theiler = std::array{0, 1, 4}[trial % 3];
    const Metric metric = trial % 2 ? Metric::MaxNorm : Metric::Euclidean;
    Matrix p = test::gaussian(n, dim, 100 + trial);
    if (trial % 5 == 0) p = (p * 2).array().round();  // force ties
    const NeighborIndex idx(p, metric, theiler);
    const int t = std::min<int>(10, static_cast<int>(n) - 2 * theiler - 1);
    for (Index i = 0; i < n; i += 7) {
      const auto a = idx.knn(i, t);
      const auto b = linear_scan::knn(p, metric, theiler, i, t);
      CHECK(a.indices == b.indices);
      CHECK(a.distance == b.distance);
      for (double r : {a.distance, a.distance * 0.5, a.distance * 1.5, 1e-30}) {
        CHECK(idx.range_count(i, r) == linear_scan::range_count(p, metric, theiler, i, r));
      }
    }
  }
}

TEST_CASE("knn distance grows with T and bounds the strict count") {
  const Matrix p = test::uniform(200, 3, 77);
  const NeighborIndex idx(p, Metric::MaxNorm, 2);
  for (Index i = 0; i < 200; i += 13) {
    double prev = 0.0;
    for (int t = 1; t <= 20; ++t) {
      const auto r = idx.knn(i, t);
      CHECK(r.distance >= prev);
      prev = r.distance;
      CHECK(idx.range_count(i, r.distance * (1 - 1e-12)) <= t - 1);
    }
  }
}

TEST_CASE("jitter") {
  const Matrix p = test::gaussian(50, 3, 1);
  CHECK(jitter(p, 0.0, 3) == p);
  const Matrix a = jitter(p, 1e-10, 3);
  CHECK(a == jitter(p, 1e-10, 3));
  CHECK(a != p);
  CHECK((a - p).cwiseAbs().maxCoeff() <= 1e-10 * (1 + 1e-6));
  CHECK_THROWS_AS(jitter(p, -1.0, 3), InvalidArgument);
}
