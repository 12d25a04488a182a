#pragma once

#include <array>
#include <string>
#include <vector>

#include "nogo/operator_core.hpp"

namespace nogo {

/// Pointwise minimum h of two [0,1]-valued lists; all four of h, f-h, g-h,
/// 1-f-g+h are then pointwise nonnegative. Throws on out-of-range values or
/// length mismatch.
std::vector<double> classical_coexist(const std::vector<double>& f,
                                      const std::vector<double>& g);

/// The four operators H, A-H, B-H, I-A-B+H together with their least
/// eigenvalues. They sum to I identically.
struct CoexistenceQuadruple {
  std::array<HermitianOperator, 4> ops;
  Eigen::Vector4d least_eigenvalues;

  double min_eigenvalue() const { return least_eigenvalues.minCoeff(); }
};

CoexistenceQuadruple quadruple(const HermitianOperator& A,
                               const HermitianOperator& B,
                               const HermitianOperator& H);

struct MarginSearchConfig {
  double initial_radius = 1.0;
  int points_per_axis = 17;
  int refinement_levels = 5;
  double shrink = 4.0;
};

/// Maximized minimum eigenvalue over the coexistence quadruple, together with
/// the maximizing H. A negative value certifies that no operator H makes all
/// four members positive.
struct FeasibilityMargin {
  double value = 0.0;
  HermitianOperator argmax_H;
};

/// Maximizes t(H) = min of the four least eigenvalues over Hermitian H
/// (4 real parameters): nested grid refinement localizes the concave
/// optimum, then a Newton solve of the active-set optimality system sharpens
/// it to machine precision (the grid alone stalls on the nonsmooth ridges).
/// A and B must be rank-1 projections on a 2-dimensional space.
FeasibilityMargin coexistence_margin(const HermitianOperator& A,
                                     const HermitianOperator& B,
                                     const MarginSearchConfig& config = {});

/// Report of the forcing argument for the canonical pair A = |0><0|,
/// B = |+><+|: near-feasible H (H, A-H, B-H all have least eigenvalue
/// >= -eps) are driven toward H|1> = H|-> = 0, pinning the fourth member's
/// maximal positivity violation near -1/sqrt(2).
struct ForcedKernelReport {
  bool near_feasible = false;
  std::string failing_constraint;  // "H", "A-H" or "B-H"; empty if feasible
  double failing_value = 0.0;      // least eigenvalue of the failing member
  double norm_H_ket1 = 0.0;        // ||H|1>||
  double norm_H_ketminus = 0.0;    // ||H|->||
  double fourth_bound = 0.0;       // least eigenvalue of I-A-B+H
};

ForcedKernelReport forced_kernel_check(const HermitianOperator& A,
                                       const HermitianOperator& B,
                                       const HermitianOperator& H,
                                       double eps = 1e-3);

/// The canonical obstruction pair |0><0| and |+><+|.
HermitianOperator ket0_projector();
HermitianOperator ketplus_projector();

}  // namespace nogo
