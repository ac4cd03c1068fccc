#pragma once

// Random test inputs shared by the unit suites.

#include <random>

#include "zeno/quantum_core.hpp"

namespace zeno::test {

inline CVector random_state(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  CVector v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = Complex(g(rng), g(rng));
  return v / v.norm();
}

/// Mixture of `rank` random pure states with random weights.
inline DensityMatrix random_density(std::mt19937_64& rng, std::size_t n, std::size_t rank) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  double total = 0.0;
  for (std::size_t k = 0; k < rank; ++k) {
    const double w = u(rng);
    const CVector v = random_state(rng, n);
    m += w * v * v.adjoint();
    total += w;
  }
  m /= total;
  return DensityMatrix(hermitize(m));
}

inline HermitianOperator random_hermitian(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  CMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = Complex(g(rng), g(rng));
  }
  return HermitianOperator(hermitize(m));
}

inline CVector basis(std::size_t n, std::size_t k) {
  CVector v = CVector::Zero(static_cast<Eigen::Index>(n));
  v(static_cast<Eigen::Index>(k)) = 1.0;
  return v;
}

}  // namespace zeno::test
