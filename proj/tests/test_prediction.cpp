#include <doctest.h>

#include <cmath>
#include <random>

#include "entropy_embed/error.hpp"
#include "entropy_embed/prediction.hpp"
#include "helpers.hpp"

using namespace entropy_embed;

TEST_CASE("nearest-neighbor prediction hand examples") {
  const Matrix u = test::gaussian(40, 3, 1);
  const Vector constant = Vector::Constant(40, 2.5);
  CHECK(nn_predict(constant, u, 5, 0) == constant);
  CHECK(msr(constant, u, 5, 0).msr == 0.0);

  Matrix one(3, 1);
  one << 0, 0.1, 5;
  CHECK(nn_predict(Vector{{10, 20, 30}}, one, 1, 0) == Vector{{20, 10, 20}});

  // Two tight clusters of six points each.
  Matrix clusters(12, 2);
  Vector label(12);
  const Matrix jitter = test::uniform(12, 2, 5) * 0.1;
  for (Index i = 0; i < 12; ++i) {
    const double centre = i < 6 ? 0.0 : 10.0;
    clusters.row(i) = jitter.row(i).array() + centre;
    label[i] = i < 6 ? 0.0 : 1.0;
  }
  CHECK(nn_predict(label, clusters, 3, 0) == label);
}

TEST_CASE("nearest-neighbor kernel matches the reference") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = std::uniform_int_distribution<Index>(20, 400)(rng);
    const Index d = 1 + trial % 5;
    Matrix u = test::gaussian(n, d, 70 + trial);
    if (trial % 4 == 0) u = u.array().round();
    const Vector y = test::gaussian(n, 1, 900 + trial).col(0);
    const int t = 1 + trial % 10;
    const int theiler = std::array{0, 1, 4}[trial % 3];
    CHECK(nn_predict(y, u, t, theiler) == reference::nn_predict(y, u, t, theiler));
  }
}

TEST_CASE("mean squared residual") {
  double mean = 0.0;
  for (int seed = 0; seed < 20; ++seed) {
    const Matrix g = test::gaussian(1024, 3, 40 + seed);
    mean += msr(Vector(g.col(0)), Matrix(g.rightCols(2)), 10, 0).msr / 20;
  }
  CHECK(mean >= 0.9);
  CHECK(mean <= 1.2);

  const Matrix g = test::gaussian(300, 4, 2);
  const Vector y = g.col(0) + g.col(1).cwiseAbs();
  const auto score = msr(y, Matrix(g.rightCols(3)), 7, 1);
  CHECK(score.msr >= 0.0);
  CHECK(score.msr == doctest::Approx(score.residuals.squaredNorm() / 300.0).epsilon(1e-15));
  Matrix swapped(300, 3);
  swapped << g.col(3), g.col(1), g.col(2);
  CHECK(msr(y, swapped, 7, 1).msr == score.msr);
  CHECK_THROWS_AS(msr(y, Matrix(300, 0), 7, 1), InvalidArgument);
  CHECK_THROWS_AS(msr(y, Matrix(g.topRows(5)), 7, 1), ShapeMismatch);
}

TEST_CASE("kernel regression") {
  const Matrix u = test::gaussian(120, 2, 8);
  const Vector constant = Vector::Constant(120, -3.0);
  CHECK(kde_predict(constant, u) == constant);
  CHECK_THROWS_AS(aic_score(constant, u), DegenerateResidual);

  Matrix single(1, 2);
  single << 0.3, 0.4;
  CHECK(kde_predict(Vector{{7.0}}, single) == Vector{{7.0}});

  Matrix grid(256, 1);
  for (Index i = 0; i < 256; ++i) grid(i, 0) = -1.0 + 2.0 * static_cast<double>(i) / 255.0;
  const Vector line = 2.0 * grid.col(0);
  const Vector pred = kde_predict(line, grid);
  // Rows at least three bandwidths from either edge see a symmetric window.
  const double h = kde_fit(line, grid).bandwidth * std::sqrt(grid.col(0).array().square().sum() / 255.0);
  double worst = 0.0;
  for (Index i = 0; i < 256; ++i)
    if (std::abs(grid(i, 0)) <= 1.0 - 3.0 * h) worst = std::max(worst, std::abs(pred[i] - line[i]));
  CHECK(worst <= 0.01);

  CHECK(kde_bandwidth(1, 100) ==
        doctest::Approx(1.5 * std::pow(1.0 / 3.0, 0.2) * std::pow(100.0, -0.2)));

  Matrix dup(50, 2);
  dup.col(0) = 10.0 * test::gaussian(50, 1, 1).col(0);
  dup.col(1) = dup.col(0);
  // The 1e-10 ridge caps the condition number of unit-scale duplicates below 1e12.
  CHECK_NOTHROW(kde_fit(Vector(dup.col(0)), Matrix(dup / 10.0)));
  CHECK_THROWS_AS(kde_fit(Vector(dup.col(0)), dup), SingularCovariance);
}

TEST_CASE("kernel regression is a convex combination with bounded complexity") {
  for (int seed = 0; seed < 10; ++seed) {
    const Matrix g = test::gaussian(150, 4, 300 + seed);
    const Vector y = g.col(0).array().cube();
    const KdeFit fit = kde_fit(y, Matrix(g.rightCols(1 + seed % 3)));
    const double tol = 1e-12 * y.cwiseAbs().maxCoeff();
    CHECK(fit.predictions.minCoeff() >= y.minCoeff() - tol);
    CHECK(fit.predictions.maxCoeff() <= y.maxCoeff() + tol);
    CHECK(fit.complexity > 0.0);
    CHECK(fit.complexity <= 150.0);
  }
}

TEST_CASE("AIC penalizes an irrelevant column") {
  int worse = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix g = test::gaussian(256, 3, 7000 + trial);
    const Vector y = Vector(g.col(0).array().sin()) + 0.3 * g.col(1);
    const double base = aic_score(y, Matrix(g.col(0)));
    Matrix with_noise(256, 2);
    with_noise << g.col(0), g.col(2);
    worse += aic_score(y, with_noise) > base;
  }
  CHECK(worse >= 40);
}
