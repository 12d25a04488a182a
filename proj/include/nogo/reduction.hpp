#pragma once

#include "nogo/operator_core.hpp"

namespace nogo {

/// Column-orthonormal isometry i from a small space into a big one, with the
/// adjoint projection p = i^*. p o i is the identity on the small space and
/// i o p projects orthogonally onto the embedded subspace.
class SubspaceEmbedding {
 public:
  explicit SubspaceEmbedding(CMatrix isometry);

  /// Embedding through the first small_dim standard basis vectors.
  static SubspaceEmbedding standard(Eigen::Index small_dim,
                                    Eigen::Index big_dim);

  Eigen::Index small_dim() const { return isometry_.cols(); }
  Eigen::Index big_dim() const { return isometry_.rows(); }
  const CMatrix& isometry() const { return isometry_; }
  CMatrix projector() const { return isometry_.adjoint(); }
  /// i o p, the orthogonal projector onto the embedded subspace.
  CMatrix subspace_projector() const { return isometry_ * isometry_.adjoint(); }

 private:
  CMatrix isometry_;
};

/// rho_bar = i o rho o p. Positive and trace 1 whenever rho is; pure states
/// map to the embedded vector.
HermitianOperator expand_state(const HermitianOperator& rho,
                               const SubspaceEmbedding& emb);

/// E_bar = i o E o p for a rank-1 projection E; preserves rank and every
/// pairing tr(rho_bar E_bar) = tr(rho E).
HermitianOperator expand_effect_plain(const HermitianOperator& E,
                                      const SubspaceEmbedding& emb);

/// E_bar = i o E o p + <alpha|E|alpha> (I - i o p): agrees with E on the
/// subspace and with a scalar multiple of the identity on its complement.
/// Sends POVMs to POVMs, identity to identity, zero to zero, and preserves
/// tr(rho_bar E_bar) = tr(rho E).
HermitianOperator expand_effect_compensated(const HermitianOperator& E,
                                            const SubspaceEmbedding& emb,
                                            const CVector& alpha);

/// Variant with the averaged multiplier tr(E)/d in place of <alpha|E|alpha>;
/// satisfies the same POVM-sum identity.
HermitianOperator expand_effect_averaged(const HermitianOperator& E,
                                         const SubspaceEmbedding& emb);

}  // namespace nogo
