#include "nogo/reduction.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace nogo {

namespace {

void require_density(const HermitianOperator& rho) {
  if (std::abs(rho.trace() - 1.0) > 1e-9) {
    throw PreconditionError("density operator must have trace 1");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix(),
                                            Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9) {
    throw PreconditionError("density operator must be positive");
  }
}

void require_effect(const HermitianOperator& E) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(E.matrix(),
                                            Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9 ||
      es.eigenvalues().maxCoeff() > 1.0 + 1e-9) {
    throw PreconditionError("operator is not an effect");
  }
}

}  // namespace

SubspaceEmbedding::SubspaceEmbedding(CMatrix isometry)
    : isometry_(std::move(isometry)) {
  if (isometry_.rows() < isometry_.cols() || isometry_.cols() < 1) {
    throw DimensionMismatchError(
        "embedding isometry must map into a space of at least its rank");
  }
  const CMatrix gram = isometry_.adjoint() * isometry_;
  if ((gram - CMatrix::Identity(isometry_.cols(), isometry_.cols())).norm() >
      1e-9) {
    throw PreconditionError("embedding columns must be orthonormal");
  }
}

SubspaceEmbedding SubspaceEmbedding::standard(Eigen::Index small_dim,
                                              Eigen::Index big_dim) {
  return SubspaceEmbedding(standard_frame(big_dim, small_dim));
}

HermitianOperator expand_state(const HermitianOperator& rho,
                               const SubspaceEmbedding& emb) {
  if (rho.dim() != emb.small_dim()) {
    throw DimensionMismatchError("expand_state: dimension mismatch");
  }
  require_density(rho);
  return HermitianOperator(emb.isometry() * rho.matrix() * emb.projector(),
                           rho.tol());
}

HermitianOperator expand_effect_plain(const HermitianOperator& E,
                                      const SubspaceEmbedding& emb) {
  if (E.dim() != emb.small_dim()) {
    throw DimensionMismatchError("expand_effect_plain: dimension mismatch");
  }
  if ((E.matrix() * E.matrix() - E.matrix()).norm() > 1e-9 ||
      std::abs(E.trace() - 1.0) > 1e-9) {
    throw PreconditionError(
        "expand_effect_plain: operator must be a rank-1 projection");
  }
  return HermitianOperator(emb.isometry() * E.matrix() * emb.projector(),
                           E.tol());
}

HermitianOperator expand_effect_compensated(const HermitianOperator& E,
                                            const SubspaceEmbedding& emb,
                                            const CVector& alpha) {
  if (E.dim() != emb.small_dim() || alpha.size() != emb.small_dim()) {
    throw DimensionMismatchError(
        "expand_effect_compensated: dimension mismatch");
  }
  require_effect(E);
  if (std::abs(alpha.norm() - 1.0) > 1e-9) {
    throw PreconditionError("alpha must be a unit vector");
  }
  const double multiplier =
      (alpha.adjoint() * E.matrix() * alpha)(0, 0).real();
  const CMatrix big_identity =
      CMatrix::Identity(emb.big_dim(), emb.big_dim());
  return HermitianOperator(
      emb.isometry() * E.matrix() * emb.projector() +
          multiplier * (big_identity - emb.subspace_projector()),
      E.tol());
}

HermitianOperator expand_effect_averaged(const HermitianOperator& E,
                                         const SubspaceEmbedding& emb) {
  if (E.dim() != emb.small_dim()) {
    throw DimensionMismatchError("expand_effect_averaged: dimension mismatch");
  }
  require_effect(E);
  const double multiplier = E.trace() / static_cast<double>(E.dim());
  const CMatrix big_identity =
      CMatrix::Identity(emb.big_dim(), emb.big_dim());
  return HermitianOperator(
      emb.isometry() * E.matrix() * emb.projector() +
          multiplier * (big_identity - emb.subspace_projector()),
      E.tol());
}

}  // namespace nogo
