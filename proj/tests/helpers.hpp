#pragma once

#include <random>

#include "nogo/operator_core.hpp"

namespace nogo::testing {

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

inline CVector random_unit_vector(std::mt19937_64& rng, Eigen::Index dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    v[i] = Complex(normal(rng), normal(rng));
  }
  return v / v.norm();
}

inline HermitianOperator random_hermitian(std::mt19937_64& rng,
                                          Eigen::Index dim,
                                          double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      m(i, j) = Complex(normal(rng), normal(rng));
    }
  }
  return HermitianOperator(scale * 0.5 * (m + m.adjoint().eval()));
}

inline CMatrix random_unitary(std::mt19937_64& rng, Eigen::Index dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      m(i, j) = Complex(normal(rng), normal(rng));
    }
  }
  Eigen::HouseholderQR<CMatrix> qr(m);
  CMatrix q = qr.householderQ();
  return q;
}

// Random density operator: positive, trace 1.
inline HermitianOperator random_density(std::mt19937_64& rng,
                                        Eigen::Index dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      m(i, j) = Complex(normal(rng), normal(rng));
    }
  }
  CMatrix rho = m * m.adjoint();
  rho /= rho.trace().real();
  return HermitianOperator(std::move(rho));
}

// Random effect: spectrum within [0,1].
inline HermitianOperator random_effect(std::mt19937_64& rng,
                                       Eigen::Index dim) {
  HermitianOperator h = random_hermitian(rng, dim);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix());
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  const double span = std::max(hi - lo, 1e-9);
  CMatrix e = (h.matrix() - lo * CMatrix::Identity(dim, dim)) / span;
  return HermitianOperator(std::move(e));
}

inline Eigen::Vector3d random_unit3(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Vector3d v;
  do {
    v << normal(rng), normal(rng), normal(rng);
  } while (v.norm() < 1e-6);
  return v / v.norm();
}

}  // namespace nogo::testing
