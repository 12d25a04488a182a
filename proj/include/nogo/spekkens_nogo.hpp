#pragma once

#include <optional>
#include <string>

#include "nogo/operator_core.hpp"

namespace nogo {

/// Finite hidden-variable candidate over npoints weighted sample points:
/// state densities mu_rho(x)(lambda) = x . A(lambda) + C(lambda) and effect
/// responses xi_E(m,p)(lambda) = p . B(lambda) + m. The declared constraints
/// are not assumed; verify_candidate checks them.
struct FiniteRepresentationCandidate {
  Eigen::VectorXd weights;              // nonnegative integration weights
  Eigen::Matrix<double, Eigen::Dynamic, 3> A;
  Eigen::Matrix<double, Eigen::Dynamic, 3> B;
  Eigen::VectorXd C;

  Eigen::Index npoints() const { return weights.size(); }
};

/// Throws PreconditionError on shape mismatch or negative weights.
void require_well_formed(const FiniteRepresentationCandidate& cand);

/// mu_rho(x)(lambda) = x . A(lambda) + C(lambda).
double mu_value(const Eigen::Vector3d& x,
                const FiniteRepresentationCandidate& cand, Eigen::Index lambda);

/// xi_E(m,p)(lambda) = p . B(lambda) + m.
double xi_value(double m, const Eigen::Vector3d& p,
                const FiniteRepresentationCandidate& cand, Eigen::Index lambda);

/// Tr(rho(x) E(m,p)) = m + x . p. Parameters must satisfy the Bloch-ball and
/// effect constraints.
double pauli_trace(const Eigen::Vector3d& x, double m,
                   const Eigen::Vector3d& p);

/// Constraint families, in the fixed order used for reporting.
///   N1: ||B(lambda)|| <= 1 for all lambda
///   N2: ||A(lambda)|| <= C(lambda) for all lambda
///   E2: sum_l w B_i A_j = delta_ij
///   E3: sum_l w B_i C = 0
///   E4: sum_l w A_i = 0
///   E5: sum_l w C = 1
struct RefutationReport {
  std::string violated;      // "N1", "N2", "E2", "E3", "E4", "E5"
  Eigen::Index lambda = -1;  // for N1/N2: the offending point
  int i = -1, j = -1;        // for E2/E3/E4: the offending component(s)
  double magnitude = 0.0;    // amount by which the constraint fails
};

/// Checks N1, N2, E2, E3, E4, E5 in this order with tolerance 1e-8 and
/// returns the first violation; no candidate can pass all six.
std::optional<RefutationReport> verify_candidate(
    const FiniteRepresentationCandidate& cand, double tol = 1e-8);

/// Replays the inequality chain on a candidate that satisfies N1,
/// N2, E4, E5 within tol: if the E2 diagonal also holds, every point with
/// C(lambda) > tol must carry |B_i(lambda)| = 1 for all i simultaneously,
/// i.e. ||B(lambda)|| = sqrt(3), contradicting N1. Returns the lambda where
/// the forced violation is largest, the failing E2 diagonal otherwise, or the
/// failing precondition.
RefutationReport refute_by_chain(const FiniteRepresentationCandidate& cand,
                                 double tol = 1e-8);

}  // namespace nogo
