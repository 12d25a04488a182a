#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "nogo/errors.hpp"

namespace nogo {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Global default tolerance for approximate comparisons. Every operation
// accepting a tolerance defaults to this value; callers may override per call.
double default_tolerance();
void set_default_tolerance(double tol);

/// Dense complex square matrix constrained to equal its conjugate transpose.
/// The stored matrix is the Hermitian average (M + M^*)/2 of the input, which
/// must already be Hermitian within `tol`.
class HermitianOperator {
 public:
  explicit HermitianOperator(CMatrix entries, double tol = -1.0);

  Eigen::Index dim() const { return mat_.rows(); }
  const CMatrix& matrix() const { return mat_; }
  double tol() const { return tol_; }

  double trace() const { return mat_.trace().real(); }
  double frobenius_norm() const { return mat_.norm(); }

 private:
  CMatrix mat_;
  double tol_;
};

/// Unit vector up to phase. Normalized at construction.
class Ray {
 public:
  explicit Ray(CVector v);

  Eigen::Index dim() const { return v_.size(); }
  const CVector& vector() const { return v_; }

  /// Rank-1 projection |v><v|.
  HermitianOperator projector() const;

 private:
  CVector v_;
};

/// Phase-invariant ray equality: |<u,v>| >= 1 - 1e-9.
bool same_ray(const Ray& u, const Ray& v);

/// Finite set of simultaneous-eigenvalue tuples of a commuting family,
/// sorted lexicographically.
struct JointSpectrum {
  int arity = 0;
  std::vector<RVector> points;

  bool contains(const RVector& nu, double tol = -1.0) const;
};

/// A = b*B - c*C with B, C positive and trace 1. A part is absent when its
/// coefficient vanishes.
struct JordanParts {
  double b = 0.0;
  std::optional<HermitianOperator> B;
  double c = 0.0;
  std::optional<HermitianOperator> C;
};

enum class PauliKind { kState, kEffect };

/// Pauli parametrization of a 2x2 Hermitian operator.
/// For kState the field x is the Bloch vector, ||x|| <= 1, and the operator is
/// (I + x.sigma)/2 (w is fixed to 1/2, the identity coefficient).
/// For kEffect the fields are (m, p) with w = m and the operator is
/// w*I + x.sigma, subject to ||x|| <= w <= 1 - ||x||.
struct PauliForm {
  double w = 0.0;
  Eigen::Vector3d x = Eigen::Vector3d::Zero();
};

const CMatrix& pauli_x();
const CMatrix& pauli_y();
const CMatrix& pauli_z();

// --- Operations ------------------------------------------------------------

/// True iff ||AB - BA|| <= tol * max(1, ||A||*||B||) (Frobenius norms).
bool commute(const HermitianOperator& A, const HermitianOperator& B,
             double tol = -1.0);

/// Deduplicated real eigenvalues, ascending. Eigenvalues within
/// 1e-8 * max(1, ||A||) of each other are merged into one spectral point.
std::vector<double> spectrum(const HermitianOperator& A);

/// Simultaneous-eigenvalue tuples of a pairwise commuting family over a
/// common orthonormal eigenbasis. Throws NonCommutingError naming the first
/// offending pair.
JointSpectrum joint_spectrum(const std::vector<HermitianOperator>& ops,
                             double tol = -1.0);

/// Positive/negative part decomposition: b = sum of positive eigenvalues,
/// c = -(sum of negative eigenvalues); B and C carry the corresponding
/// eigenspaces scaled to trace 1.
JordanParts jordan_decompose(const HermitianOperator& A);

/// Sum of absolute eigenvalues (trace norm).
double trace_norm(const HermitianOperator& A);

HermitianOperator pauli_to_operator(const PauliForm& p, PauliKind kind,
                                    double tol = -1.0);
PauliForm operator_to_pauli(const HermitianOperator& A, PauliKind kind);

/// Kronecker product A (x) B.
HermitianOperator tensor(const HermitianOperator& A, const HermitianOperator& B);

/// Embed a ray into a larger space through a column-orthonormal frame
/// (bigger_dim x at-least-r.dim; the first r.dim columns are used).
Ray embed_ray(const Ray& r, Eigen::Index bigger_dim, const CMatrix& frame);

/// The first `small_dim` columns of the identity on C^big_dim.
CMatrix standard_frame(Eigen::Index big_dim, Eigen::Index small_dim);

}  // namespace nogo
