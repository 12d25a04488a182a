#include "nogo/spekkens_nogo.hpp"

#include <cmath>
#include <sstream>

namespace nogo {

void require_well_formed(const FiniteRepresentationCandidate& cand) {
  const Eigen::Index n = cand.weights.size();
  if (n < 1) throw PreconditionError("candidate needs at least one point");
  if (cand.A.rows() != n || cand.B.rows() != n || cand.C.size() != n) {
    std::ostringstream os;
    os << "candidate shape mismatch: weights " << n << ", A " << cand.A.rows()
       << ", B " << cand.B.rows() << ", C " << cand.C.size();
    throw PreconditionError(os.str());
  }
  for (Eigen::Index l = 0; l < n; ++l) {
    if (cand.weights[l] < 0.0) {
      throw PreconditionError("candidate weights must be nonnegative");
    }
  }
}

double mu_value(const Eigen::Vector3d& x,
                const FiniteRepresentationCandidate& cand,
                Eigen::Index lambda) {
  if (lambda < 0 || lambda >= cand.npoints()) {
    throw PreconditionError("mu_value: lambda index out of range");
  }
  if (x.norm() > 1.0 + 1e-9) {
    throw PreconditionError("mu_value: Bloch vector leaves the unit ball");
  }
  return x.dot(cand.A.row(lambda)) + cand.C[lambda];
}

double xi_value(double m, const Eigen::Vector3d& p,
                const FiniteRepresentationCandidate& cand,
                Eigen::Index lambda) {
  if (lambda < 0 || lambda >= cand.npoints()) {
    throw PreconditionError("xi_value: lambda index out of range");
  }
  if (p.norm() > m + 1e-9 || m > 1.0 - p.norm() + 1e-9) {
    throw PreconditionError("xi_value: effect parameters out of range");
  }
  return p.dot(cand.B.row(lambda)) + m;
}

double pauli_trace(const Eigen::Vector3d& x, double m,
                   const Eigen::Vector3d& p) {
  if (x.norm() > 1.0 + 1e-9) {
    throw PreconditionError("pauli_trace: Bloch vector leaves the unit ball");
  }
  if (p.norm() > m + 1e-9 || m > 1.0 - p.norm() + 1e-9) {
    throw PreconditionError("pauli_trace: effect parameters out of range");
  }
  return m + x.dot(p);
}

namespace {

std::optional<RefutationReport> check_n1(
    const FiniteRepresentationCandidate& cand, double tol) {
  for (Eigen::Index l = 0; l < cand.npoints(); ++l) {
    const double norm = cand.B.row(l).norm();
    if (norm > 1.0 + tol) {
      return RefutationReport{"N1", l, -1, -1, norm - 1.0};
    }
  }
  return std::nullopt;
}

std::optional<RefutationReport> check_n2(
    const FiniteRepresentationCandidate& cand, double tol) {
  for (Eigen::Index l = 0; l < cand.npoints(); ++l) {
    const double norm = cand.A.row(l).norm();
    if (norm > cand.C[l] + tol) {
      return RefutationReport{"N2", l, -1, -1, norm - cand.C[l]};
    }
  }
  return std::nullopt;
}

std::optional<RefutationReport> check_e2(
    const FiniteRepresentationCandidate& cand, double tol) {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double sum =
          (cand.weights.array() * cand.B.col(i).array() * cand.A.col(j).array())
              .sum();
      const double target = (i == j) ? 1.0 : 0.0;
      if (std::abs(sum - target) > tol) {
        return RefutationReport{"E2", -1, i + 1, j + 1,
                                std::abs(sum - target)};
      }
    }
  }
  return std::nullopt;
}

std::optional<RefutationReport> check_e3(
    const FiniteRepresentationCandidate& cand, double tol) {
  for (int i = 0; i < 3; ++i) {
    const double sum =
        (cand.weights.array() * cand.B.col(i).array() * cand.C.array()).sum();
    if (std::abs(sum) > tol) {
      return RefutationReport{"E3", -1, i + 1, -1, std::abs(sum)};
    }
  }
  return std::nullopt;
}

std::optional<RefutationReport> check_e4(
    const FiniteRepresentationCandidate& cand, double tol) {
  for (int i = 0; i < 3; ++i) {
    const double sum = (cand.weights.array() * cand.A.col(i).array()).sum();
    if (std::abs(sum) > tol) {
      return RefutationReport{"E4", -1, i + 1, -1, std::abs(sum)};
    }
  }
  return std::nullopt;
}

std::optional<RefutationReport> check_e5(
    const FiniteRepresentationCandidate& cand, double tol) {
  const double sum = (cand.weights.array() * cand.C.array()).sum();
  if (std::abs(sum - 1.0) > tol) {
    return RefutationReport{"E5", -1, -1, -1, std::abs(sum - 1.0)};
  }
  return std::nullopt;
}

}  // namespace

std::optional<RefutationReport> verify_candidate(
    const FiniteRepresentationCandidate& cand, double tol) {
  require_well_formed(cand);
  if (auto r = check_n1(cand, tol)) return r;
  if (auto r = check_n2(cand, tol)) return r;
  if (auto r = check_e2(cand, tol)) return r;
  if (auto r = check_e3(cand, tol)) return r;
  if (auto r = check_e4(cand, tol)) return r;
  if (auto r = check_e5(cand, tol)) return r;
  return std::nullopt;
}

RefutationReport refute_by_chain(const FiniteRepresentationCandidate& cand,
                                 double tol) {
  require_well_formed(cand);
  if (auto r = check_n2(cand, tol)) return *r;
  if (auto r = check_e4(cand, tol)) return *r;
  if (auto r = check_e5(cand, tol)) return *r;

  bool diag_holds = true;
  RefutationReport e2_report;
  for (int i = 0; i < 3 && diag_holds; ++i) {
    const double sum = (cand.weights.array() * cand.B.col(i).array() *
                        cand.A.col(i).array())
                           .sum();
    if (std::abs(sum - 1.0) > tol) {
      diag_holds = false;
      e2_report = RefutationReport{"E2", -1, i + 1, i + 1, std::abs(sum - 1.0)};
    }
  }

  if (diag_holds) {
    // Equality in the chain
    //   1 = |sum w B_i A_i| <= sum w |B_i| |A_i| <= sum w C = 1
    // forces |B_i(lambda)| = 1 wherever C(lambda) > 0 for all i at once, so
    // ||B(lambda)|| = sqrt(3) there. No candidate can then respect N1; report
    // the point where the forced violation is largest.
    Eigen::Index worst = -1;
    double worst_norm = -1.0;
    for (Eigen::Index l = 0; l < cand.npoints(); ++l) {
      if (cand.weights[l] <= 0.0 || cand.C[l] <= tol) continue;
      const double norm = cand.B.row(l).norm();
      if (norm > worst_norm) {
        worst_norm = norm;
        worst = l;
      }
    }
    if (worst < 0) {
      // C vanishes on every weighted point, so sum w C = 0, not 1.
      return RefutationReport{"E5", -1, -1, -1, 1.0};
    }
    return RefutationReport{"N1", worst, -1, -1, worst_norm - 1.0};
  }

  // The chain never starts: either the remaining precondition N1 fails, or
  // E2 itself is the violation.
  if (auto r = check_n1(cand, tol)) return *r;
  return e2_report;
}

}  // namespace nogo
