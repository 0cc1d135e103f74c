#pragma once

#include <cstdint>
#include <random>

#include "entropy_embed/series.hpp"

namespace test {

using entropy_embed::Index;
using entropy_embed::Matrix;
using entropy_embed::Vector;

inline Matrix gaussian(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) m(r, c) = g(rng);
  return m;
}

inline Matrix uniform(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u;
  Matrix m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) m(r, c) = u(rng);
  return m;
}

// Channels x samples series of independent Gaussian noise.
inline entropy_embed::MultivariateSeries noise_series(Index channels, Index samples,
                                                      std::uint64_t seed) {
  const Matrix g = gaussian(samples, channels, seed);
  return entropy_embed::MultivariateSeries::unlabeled(g.transpose());
}

}  // namespace test
