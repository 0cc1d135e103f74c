#pragma once

#include "entropy_embed/series.hpp"

namespace entropy_embed {

/// Digamma function for x > 0; throws DomainError otherwise.
double digamma(double x);

struct KsgParams {
  int neighbors = 10;  ///< T, the joint-space neighbor count
  int theiler = 0;
};

/// KSG estimate of I(Y;W) in nats; w may have several columns.
double ksg_mi(const Vector& y, const Matrix& w, const KsgParams& params);

/// KSG estimate of I(Y;W|S) in nats. Zero-column s reduces to ksg_mi.
double ksg_cmi(const Vector& y, const Vector& w, const Matrix& s, const KsgParams& params);

/// Multivariate form: I(A;B|S) for column blocks A, B and S.
double ksg_cmi(const Matrix& a, const Matrix& b, const Matrix& s, const KsgParams& params);

/// Conditional transfer entropy from `source` into the target given the
/// embedding: I(target; source lags | remaining embedding columns). Exactly 0
/// when the embedding holds no lag of the source.
double ksg_cte(const Vector& target, const EmbeddingState& embedding, int source,
               const KsgParams& params);

/// Straightforward per-point evaluation through NeighborIndex queries; used to
/// check the pairwise kernels.
namespace reference {

double ksg_cmi(const Matrix& a, const Matrix& b, const Matrix& s, const KsgParams& params);
double ksg_mi(const Vector& y, const Matrix& w, const KsgParams& params);

}  // namespace reference

}  // namespace entropy_embed
