#include "nogo/expectation_nogo.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace nogo {

std::vector<double> classical_coexist(const std::vector<double>& f,
                                      const std::vector<double>& g) {
  if (f.size() != g.size()) {
    throw DimensionMismatchError("classical_coexist: length mismatch");
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] < -1e-12 || f[i] > 1.0 + 1e-12 || g[i] < -1e-12 ||
        g[i] > 1.0 + 1e-12) {
      std::ostringstream os;
      os << "classical_coexist: value out of [0,1] at index " << i;
      throw PreconditionError(os.str());
    }
  }
  std::vector<double> h(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) h[i] = std::min(f[i], g[i]);
  return h;
}

namespace {

double least_eigenvalue(const HermitianOperator& A) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(A.matrix(),
                                            Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void require_rank1_projection_dim2(const HermitianOperator& P,
                                   const char* name) {
  if (P.dim() != 2) {
    std::ostringstream os;
    os << name << " must act on a 2-dimensional space";
    throw DimensionMismatchError(os.str());
  }
  if ((P.matrix() * P.matrix() - P.matrix()).norm() > 1e-9 ||
      std::abs(P.trace() - 1.0) > 1e-9) {
    std::ostringstream os;
    os << name << " must be a rank-1 projection";
    throw PreconditionError(os.str());
  }
}

}  // namespace

CoexistenceQuadruple quadruple(const HermitianOperator& A,
                               const HermitianOperator& B,
                               const HermitianOperator& H) {
  if (A.dim() != B.dim() || A.dim() != H.dim()) {
    throw DimensionMismatchError("quadruple: operand dimensions differ");
  }
  const CMatrix I = CMatrix::Identity(A.dim(), A.dim());
  CoexistenceQuadruple q{{HermitianOperator(H.matrix()),
                          HermitianOperator(A.matrix() - H.matrix()),
                          HermitianOperator(B.matrix() - H.matrix()),
                          HermitianOperator(I - A.matrix() - B.matrix() +
                                            H.matrix())},
                         Eigen::Vector4d::Zero()};
  for (int k = 0; k < 4; ++k) {
    q.least_eigenvalues[k] = least_eigenvalue(q.ops[k]);
  }
  return q;
}

namespace {

// One member of the quadruple in Pauli coordinates: its least eigenvalue as a
// function of H = h0*I + h.sigma is f(x) = alpha + s*h0 - ||h - c||.
struct MarginPiece {
  double alpha;
  double sign;
  Eigen::Vector3d c;
};

double piece_value(const MarginPiece& pc, const Eigen::Vector4d& x) {
  return pc.alpha + pc.sign * x[0] - (x.tail<3>() - pc.c).norm();
}

double min_over_pieces(const std::array<MarginPiece, 4>& pcs,
                       const Eigen::Vector4d& x) {
  double m = piece_value(pcs[0], x);
  for (int k = 1; k < 4; ++k) m = std::min(m, piece_value(pcs[k], x));
  return m;
}

// Newton iteration on the KKT system of max tau s.t. f_i >= tau over the
// active set found by the grid phase. Quadratic convergence where the grid
// alone stalls on the nonsmooth ridges; any failure leaves the grid result
// untouched.
void kkt_polish(const std::array<MarginPiece, 4>& pcs, Eigen::Vector4d& x,
                double& value) {
  std::vector<int> active;
  for (int i = 0; i < 4; ++i) {
    if (piece_value(pcs[i], x) <= value + 1e-2) active.push_back(i);
  }
  const int m = static_cast<int>(active.size());
  if (m < 2) return;

  Eigen::VectorXd z(5 + m);  // x, tau, lambda
  z.head<4>() = x;
  z[4] = value;
  for (int k = 0; k < m; ++k) z[5 + k] = 1.0 / m;

  for (int iter = 0; iter < 60; ++iter) {
    Eigen::VectorXd F = Eigen::VectorXd::Zero(5 + m);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(5 + m, 5 + m);
    const Eigen::Vector3d h = z.segment<3>(1);
    for (int k = 0; k < m; ++k) {
      const MarginPiece& pc = pcs[active[k]];
      const Eigen::Vector3d d = h - pc.c;
      const double nd = d.norm();
      if (nd < 1e-10) return;  // cone vertex: gradient undefined
      Eigen::Vector4d grad;
      grad << pc.sign, -d / nd;
      F.head<4>() += z[5 + k] * grad;
      J.block<4, 1>(0, 5 + k) = grad;
      const Eigen::Vector3d u = d / nd;
      J.block<3, 3>(1, 1) +=
          z[5 + k] * (-(Eigen::Matrix3d::Identity() - u * u.transpose()) / nd);
      F[5 + k] = pc.alpha + pc.sign * z[0] - nd - z[4];
      J.block<1, 4>(5 + k, 0) = grad.transpose();
      J(5 + k, 4) = -1.0;
    }
    F[4] = z.tail(m).sum() - 1.0;
    for (int k = 0; k < m; ++k) J(4, 5 + k) = 1.0;
    const Eigen::VectorXd step = J.fullPivLu().solve(-F);
    if (!step.allFinite()) return;
    z += step;
    if (step.norm() < 1e-14) break;
  }
  for (int k = 0; k < m; ++k) {
    if (z[5 + k] < -1e-9) return;  // not a max-min stationary point
  }
  const Eigen::Vector4d candidate = z.head<4>();
  const double v = min_over_pieces(pcs, candidate);
  if (v > value) {
    value = v;
    x = candidate;
  }
}

}  // namespace

FeasibilityMargin coexistence_margin(const HermitianOperator& A,
                                     const HermitianOperator& B,
                                     const MarginSearchConfig& config) {
  require_rank1_projection_dim2(A, "coexistence_margin: A");
  require_rank1_projection_dim2(B, "coexistence_margin: B");

  // Pauli coefficients: P = w*I + v.sigma with w = 1/2, ||v|| = 1/2.
  auto coeffs = [](const HermitianOperator& P) {
    Eigen::Vector3d v;
    v << 0.5 * (P.matrix() * pauli_x()).trace().real(),
        0.5 * (P.matrix() * pauli_y()).trace().real(),
        0.5 * (P.matrix() * pauli_z()).trace().real();
    return std::make_pair(0.5 * P.matrix().trace().real(), v);
  };
  const auto [wa, va] = coeffs(A);
  const auto [wb, vb] = coeffs(B);

  // Least eigenvalue of w*I + v.sigma is w - ||v||, so the four members of
  // the quadruple are evaluated in closed form.
  const std::array<MarginPiece, 4> pcs{
      MarginPiece{0.0, 1.0, Eigen::Vector3d::Zero()},
      MarginPiece{wa, -1.0, va},
      MarginPiece{wb, -1.0, vb},
      MarginPiece{1.0 - wa - wb, 1.0, va + vb}};

  Eigen::Vector4d center = Eigen::Vector4d::Zero();
  double radius = config.initial_radius;
  const int ppa = config.points_per_axis;
  double best = min_over_pieces(pcs, center);
  Eigen::Vector4d best_p = center;

  for (int level = 0; level <= config.refinement_levels; ++level) {
    for (int i0 = 0; i0 < ppa; ++i0) {
      for (int i1 = 0; i1 < ppa; ++i1) {
        for (int i2 = 0; i2 < ppa; ++i2) {
          for (int i3 = 0; i3 < ppa; ++i3) {
            Eigen::Vector4d p;
            p << center[0] + radius * (2.0 * i0 / (ppa - 1) - 1.0),
                center[1] + radius * (2.0 * i1 / (ppa - 1) - 1.0),
                center[2] + radius * (2.0 * i2 / (ppa - 1) - 1.0),
                center[3] + radius * (2.0 * i3 / (ppa - 1) - 1.0);
            const double v = min_over_pieces(pcs, p);
            if (v > best) {
              best = v;
              best_p = p;
            }
          }
        }
      }
    }
    center = best_p;
    radius /= config.shrink;
  }

  kkt_polish(pcs, best_p, best);

  CMatrix Hm = best_p[0] * CMatrix::Identity(2, 2) + best_p[1] * pauli_x() +
               best_p[2] * pauli_y() + best_p[3] * pauli_z();
  return FeasibilityMargin{best, HermitianOperator(std::move(Hm))};
}

HermitianOperator ket0_projector() {
  CMatrix m(2, 2);
  m << 1, 0, 0, 0;
  return HermitianOperator(std::move(m));
}

HermitianOperator ketplus_projector() {
  CMatrix m(2, 2);
  m << 0.5, 0.5, 0.5, 0.5;
  return HermitianOperator(std::move(m));
}

ForcedKernelReport forced_kernel_check(const HermitianOperator& A,
                                       const HermitianOperator& B,
                                       const HermitianOperator& H,
                                       double eps) {
  if ((A.matrix() - ket0_projector().matrix()).norm() > 1e-9 ||
      (B.matrix() - ketplus_projector().matrix()).norm() > 1e-9) {
    throw PreconditionError(
        "forced_kernel_check: A, B must be |0><0| and |+><+|");
  }
  if (H.dim() != 2) {
    throw DimensionMismatchError("forced_kernel_check: H must be 2x2");
  }

  ForcedKernelReport report;
  const CoexistenceQuadruple q = quadruple(A, B, H);
  static const char* kNames[3] = {"H", "A-H", "B-H"};
  report.near_feasible = true;
  for (int k = 0; k < 3; ++k) {
    if (q.least_eigenvalues[k] < -eps) {
      report.near_feasible = false;
      report.failing_constraint = kNames[k];
      report.failing_value = q.least_eigenvalues[k];
      break;
    }
  }

  CVector ket1(2), ketminus(2);
  ket1 << 0, 1;
  ketminus << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  report.norm_H_ket1 = (H.matrix() * ket1).norm();
  report.norm_H_ketminus = (H.matrix() * ketminus).norm();
  report.fourth_bound = q.least_eigenvalues[3];
  return report;
}

}  // namespace nogo
