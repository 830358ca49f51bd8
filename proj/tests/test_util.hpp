#pragma once

#include "mdt/kernels.hpp"
#include "mdt/operator_space.hpp"

#include <random>

namespace mdt::test {

// Dense random row-stochastic matrix with a positive diagonal.
inline Matrix random_stochastic(Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) m(i, j) = u(rng);
  }
  return (m.rowwise().sum().cwiseInverse().asDiagonal() * m).eval();
}

inline std::vector<TransitionMatrix> random_operators(Index n, std::size_t v, std::mt19937_64& rng) {
  std::vector<TransitionMatrix> out;
  for (std::size_t i = 0; i < v; ++i) out.emplace_back(random_stochastic(n, rng));
  return out;
}

inline Matrix gaussian_points(Index n, Index d, std::mt19937_64& rng, double shift = 0.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix x(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) x(i, j) = g(rng) + shift;
  }
  return x;
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace mdt::test
