#pragma once

#include "entropy_embed/series.hpp"

namespace entropy_embed {

struct PredictionScore {
  double msr = 0.0;  ///< mean of squared residuals
  Vector residuals;  ///< y - prediction
};

/// Nearest-neighbor regression of y on the rows of u: each prediction is the
/// mean of y over the T Euclidean-nearest rows, excluding the row itself and
/// its Theiler window. Throws NotEnoughNeighbors.
Vector nn_predict(const Vector& y, const Matrix& u, int neighbors, int theiler);

/// Residuals and mean squared residual of nn_predict.
PredictionScore msr(const Vector& y, const Matrix& u, int neighbors, int theiler);

/// Residuals and their mean square for an arbitrary prediction.
PredictionScore score_prediction(const Vector& y, const Vector& prediction);

/// Nadaraya-Watson regression with a Gaussian kernel on the Mahalanobis
/// distance (sample covariance of u) and the Gaussian reference bandwidth.
/// Each row contributes to its own prediction.
struct KdeFit {
  Vector predictions;
  double complexity = 0.0;  ///< sum_i K(u_i,u_i) / sum_j K(u_i,u_j)
  double bandwidth = 0.0;
};

/// Throws SingularCovariance when the covariance condition number exceeds 1e12.
KdeFit kde_fit(const Vector& y, const Matrix& u);
Vector kde_predict(const Vector& y, const Matrix& u);

/// h = 1.5 * (1/(d+2))^(1/(d+4)) * N^(-1/(d+4)).
double kde_bandwidth(Index dimension, Index samples);

/// N * ln(mean squared KDE residual) + 2p, with p the KDE complexity.
/// Throws DegenerateResidual when the mean squared residual is below 1e-300.
double aic_score(const Vector& y, const Matrix& u);

namespace reference {

/// nn_predict evaluated through per-row NeighborIndex queries.
Vector nn_predict(const Vector& y, const Matrix& u, int neighbors, int theiler);

}  // namespace reference

}  // namespace entropy_embed
