#include "entropy_embed/prediction.hpp"

#include <cmath>
#include <string>

#include "entropy_embed/error.hpp"
#include "entropy_embed/kernels.hpp"
#include "entropy_embed/neighbors.hpp"

namespace entropy_embed {

namespace {

void check_inputs(const Vector& y, const Matrix& u) {
  if (y.rows() != u.rows())
    throw ShapeMismatch("y has " + std::to_string(y.rows()) + " rows but u has " +
                        std::to_string(u.rows()));
  if (u.cols() < 1) throw InvalidArgument("regression needs at least one column");
}

}  // namespace

Vector nn_predict(const Vector& y, const Matrix& u, int neighbors, int theiler) {
  check_inputs(y, u);
  const auto dist = kernels::PairwiseDistances::from_columns(u, Metric::Euclidean);
  return kernels::nn_predict(y.rows(), kernels::RowSource(dist), y.data(), neighbors, theiler);
}

PredictionScore score_prediction(const Vector& y, const Vector& prediction) {
  PredictionScore out;
  out.residuals = y - prediction;
  double sum = 0.0;
  for (Index i = 0; i < out.residuals.rows(); ++i) sum += out.residuals[i] * out.residuals[i];
  out.msr = sum / static_cast<double>(out.residuals.rows());
  return out;
}

PredictionScore msr(const Vector& y, const Matrix& u, int neighbors, int theiler) {
  return score_prediction(y, nn_predict(y, u, neighbors, theiler));
}

double kde_bandwidth(Index dimension, Index samples) {
  const double d = static_cast<double>(dimension);
  return 1.5 * std::pow(1.0 / (d + 2.0), 1.0 / (d + 4.0)) *
         std::pow(static_cast<double>(samples), -1.0 / (d + 4.0));
}

KdeFit kde_fit(const Vector& y, const Matrix& u) {
  check_inputs(y, u);
  const Index n = u.rows();
  const Index d = u.cols();
  KdeFit fit;
  fit.bandwidth = kde_bandwidth(d, n);
  if (n == 1) {
    fit.predictions = y;
    fit.complexity = 1.0;
    return fit;
  }

  const Matrix centered = u.rowwise() - u.colwise().mean();
  Matrix cov = centered.transpose() * centered / static_cast<double>(n - 1);
  cov.diagonal().array() += 1e-10;
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(cov, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e12) throw SingularCovariance("covariance of u is singular");

  // With cov = L L^T, the Mahalanobis form is the squared Euclidean distance
  // between whitened rows L^{-1} u_i.
  const Eigen::LLT<Matrix> llt(cov);
  const Matrix whitened = llt.matrixL().solve(u.transpose()).transpose();
  const auto dist = kernels::PairwiseDistances::from_columns(whitened, Metric::Euclidean);

  // The kernel normalization (sqrt(2 pi) h)^-d cancels in every ratio below.
  const double scale = -1.0 / (2.0 * fit.bandwidth * fit.bandwidth);
  fit.predictions.resize(n);
  Vector self_weight(n);
  // Averaging offsets from y[0] keeps a constant target exact.
  const double origin = y[0];
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    const double* row = dist.row(i);
    double num = 0.0, den = 0.0;
    for (Index j = 0; j < n; ++j) {
      const double k = std::exp(scale * row[j]);
      num += k * (y[j] - origin);
      den += k;
    }
    fit.predictions[i] = origin + num / den;
    self_weight[i] = std::exp(scale * row[i]) / den;
  }
  fit.complexity = 0.0;
  for (Index i = 0; i < n; ++i) fit.complexity += self_weight[i];
  return fit;
}

Vector kde_predict(const Vector& y, const Matrix& u) { return kde_fit(y, u).predictions; }

double aic_score(const Vector& y, const Matrix& u) {
  const KdeFit fit = kde_fit(y, u);
  const double mse = score_prediction(y, fit.predictions).msr;
  if (!(mse >= 1e-300)) throw DegenerateResidual("KDE residual is zero; AIC undefined");
  return static_cast<double>(y.rows()) * std::log(mse) + 2.0 * fit.complexity;
}

namespace reference {

Vector nn_predict(const Vector& y, const Matrix& u, int neighbors, int theiler) {
  check_inputs(y, u);
  const NeighborIndex index(u, Metric::Euclidean, theiler);
  Vector out(y.rows());
  for (Index i = 0; i < y.rows(); ++i) {
    double sum = 0.0;
    for (Index j : index.knn(i, neighbors).indices) sum += y[j];
    out[i] = sum / static_cast<double>(neighbors);
  }
  return out;
}

}  // namespace reference

}  // namespace entropy_embed
