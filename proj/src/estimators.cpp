#include "entropy_embed/estimators.hpp"

#include <cmath>
#include <memory>
#include <string>

#include "entropy_embed/error.hpp"
#include "entropy_embed/kernels.hpp"
#include "entropy_embed/neighbors.hpp"

namespace entropy_embed {

double digamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("digamma needs a finite x > 0");
  double shift = 0.0;
  while (x < 10.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  // Asymptotic expansion; the next term is below 3e-14 for x >= 10.
  const double r = 1.0 / (x * x);
  const double series =
      r * (1.0 / 12 - r * (1.0 / 120 - r * (1.0 / 252 - r * (1.0 / 240 - r * (1.0 / 132)))));
  return shift + std::log(x) - 0.5 / x - series;
}

namespace {

void check_rows(Index expected, Index got, const char* what) {
  if (expected != got)
    throw ShapeMismatch(std::string(what) + " has " + std::to_string(got) + " rows, expected " +
                        std::to_string(expected));
}

std::vector<const double*> column_pointers(const Matrix& m) {
  std::vector<const double*> out;
  for (Index c = 0; c < m.cols(); ++c) out.push_back(m.col(c).data());
  return out;
}

}  // namespace

double ksg_cmi(const Matrix& a, const Matrix& b, const Matrix& s, const KsgParams& params) {
  const Index n = a.rows();
  check_rows(n, b.rows(), "b");
  if (s.cols() > 0) check_rows(n, s.rows(), "s");
  if (a.cols() < 1 || b.cols() < 1) throw InvalidArgument("ksg_cmi needs non-empty a and b");
  using kernels::PairwiseDistances;
  using kernels::RowSource;
  const kernels::DigammaTable psi(n);
  if (s.cols() == 0) {
    const RowSource ra(nullptr, column_pointers(a), Metric::MaxNorm);
    const RowSource rb(nullptr, column_pointers(b), Metric::MaxNorm);
    return kernels::ksg(n, ra, rb, nullptr, params.neighbors, params.theiler, psi);
  }
  const auto ds = PairwiseDistances::from_columns(s, Metric::MaxNorm);
  const RowSource ra(&ds, column_pointers(a), Metric::MaxNorm);
  const RowSource rb(&ds, column_pointers(b), Metric::MaxNorm);
  const RowSource rs(ds);
  return kernels::ksg(n, ra, rb, &rs, params.neighbors, params.theiler, psi);
}

double ksg_mi(const Vector& y, const Matrix& w, const KsgParams& params) {
  return ksg_cmi(Matrix(y), w, Matrix(y.rows(), 0), params);
}

double ksg_cmi(const Vector& y, const Vector& w, const Matrix& s, const KsgParams& params) {
  return ksg_cmi(Matrix(y), Matrix(w), s, params);
}

double ksg_cte(const Vector& target, const EmbeddingState& embedding, int source,
               const KsgParams& params) {
  if (embedding.selected.empty()) throw InvalidArgument("ksg_cte needs a non-empty embedding");
  check_rows(target.rows(), embedding.realizations.rows(), "embedding");
  std::vector<Index> from_source, rest;
  for (std::size_t j = 0; j < embedding.selected.size(); ++j)
    (embedding.selected[j].channel == source ? from_source : rest).push_back(static_cast<Index>(j));
  if (from_source.empty()) return 0.0;
  const Matrix x = embedding.realizations(Eigen::all, from_source);
  const Matrix r = embedding.realizations(Eigen::all, rest);
  return ksg_cmi(Matrix(target), x, r, params);
}

namespace reference {

namespace {

Matrix hcat(std::initializer_list<const Matrix*> parts) {
  Index cols = 0;
  for (const auto* p : parts) cols += p->cols();
  Matrix out((*parts.begin())->rows(), cols);
  Index c = 0;
  for (const auto* p : parts) {
    if (p->cols() > 0) out.middleCols(c, p->cols()) = *p;
    c += p->cols();
  }
  return out;
}

}  // namespace

double ksg_cmi(const Matrix& a, const Matrix& b, const Matrix& s, const KsgParams& params) {
  const Index n = a.rows();
  check_rows(n, b.rows(), "b");
  const bool conditioned = s.cols() > 0;
  const Matrix joint = hcat({&a, &b, &s});
  const NeighborIndex joint_index(joint, Metric::MaxNorm, params.theiler);
  const NeighborIndex a_index(hcat({&a, &s}), Metric::MaxNorm, params.theiler);
  const NeighborIndex b_index(hcat({&b, &s}), Metric::MaxNorm, params.theiler);
  std::unique_ptr<NeighborIndex> s_index;
  if (conditioned) s_index = std::make_unique<NeighborIndex>(s, Metric::MaxNorm, params.theiler);

  double sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    // Half of the KSG epsilon: the T-th neighbor distance in the joint space.
    const double half_eps = joint_index.knn(i, params.neighbors).distance;
    const Index na = a_index.range_count(i, half_eps);
    const Index nb = b_index.range_count(i, half_eps);
    if (conditioned) {
      const Index ns = s_index->range_count(i, half_eps);
      sum += digamma(ns + 1.0) - digamma(na + 1.0) - digamma(nb + 1.0);
    } else {
      sum += digamma(na + 1.0) + digamma(nb + 1.0);
    }
  }
  const double mean = sum / static_cast<double>(n);
  const double psi_t = digamma(params.neighbors);
  return conditioned ? psi_t + mean : psi_t + digamma(static_cast<double>(n)) - mean;
}

double ksg_mi(const Vector& y, const Matrix& w, const KsgParams& params) {
  return reference::ksg_cmi(Matrix(y), w, Matrix(y.rows(), 0), params);
}

}  // namespace reference

}  // namespace entropy_embed
