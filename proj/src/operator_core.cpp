#include "nogo/operator_core.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <sstream>

namespace nogo {

namespace {

std::atomic<double> g_default_tol{1e-10};

double resolve_tol(double tol) { return tol < 0.0 ? default_tolerance() : tol; }

// Relative threshold below which eigenvalues are merged into one spectral
// point before any joint-spectrum or spectrum assembly.
double cluster_threshold(const HermitianOperator& A) {
  return 1e-8 * std::max(1.0, A.frobenius_norm());
}

// Merge sorted eigenvalues whose gaps fall under `threshold`; each cluster is
// represented by its mean.
std::vector<double> cluster_sorted(std::vector<double> vals, double threshold) {
  std::vector<double> out;
  std::size_t i = 0;
  while (i < vals.size()) {
    std::size_t j = i + 1;
    double sum = vals[i];
    while (j < vals.size() && vals[j] - vals[j - 1] < threshold) {
      sum += vals[j];
      ++j;
    }
    out.push_back(sum / static_cast<double>(j - i));
    i = j;
  }
  return out;
}

}  // namespace

double default_tolerance() { return g_default_tol.load(); }

void set_default_tolerance(double tol) {
  if (!(tol >= 0.0)) throw PreconditionError("tolerance must be nonnegative");
  g_default_tol.store(tol);
}

HermitianOperator::HermitianOperator(CMatrix entries, double tol)
    : tol_(resolve_tol(tol)) {
  if (entries.rows() != entries.cols() || entries.rows() < 1) {
    throw DimensionMismatchError("operator matrix must be square and nonempty");
  }
  const double dev = (entries - entries.adjoint().eval()).norm();
  const double scale = std::max(1.0, entries.norm());
  if (dev > tol_ * scale) {
    std::ostringstream os;
    os << "matrix is not Hermitian: ||M - M^*|| = " << dev;
    throw PreconditionError(os.str());
  }
  mat_ = 0.5 * (entries + entries.adjoint().eval());
}

Ray::Ray(CVector v) {
  if (v.size() < 1) throw DimensionMismatchError("ray vector must be nonempty");
  const double n = v.norm();
  if (n <= 1e-12) throw PreconditionError("zero vector is not a ray");
  v_ = v / n;
}

HermitianOperator Ray::projector() const {
  return HermitianOperator(v_ * v_.adjoint());
}

bool same_ray(const Ray& u, const Ray& v) {
  if (u.dim() != v.dim()) return false;
  return std::abs(u.vector().dot(v.vector())) >= 1.0 - 1e-9;
}

bool JointSpectrum::contains(const RVector& nu, double tol) const {
  const double t = resolve_tol(tol);
  for (const auto& p : points) {
    if (p.size() == nu.size() && (p - nu).lpNorm<Eigen::Infinity>() <= t) {
      return true;
    }
  }
  return false;
}

const CMatrix& pauli_x() {
  static const CMatrix m = [] {
    CMatrix s(2, 2);
    s << 0, 1, 1, 0;
    return s;
  }();
  return m;
}

const CMatrix& pauli_y() {
  static const CMatrix m = [] {
    CMatrix s(2, 2);
    s << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return s;
  }();
  return m;
}

const CMatrix& pauli_z() {
  static const CMatrix m = [] {
    CMatrix s(2, 2);
    s << 1, 0, 0, -1;
    return s;
  }();
  return m;
}

bool commute(const HermitianOperator& A, const HermitianOperator& B,
             double tol) {
  if (A.dim() != B.dim()) {
    throw DimensionMismatchError("commute: operand dimensions differ");
  }
  const double t = resolve_tol(tol);
  const CMatrix comm = A.matrix() * B.matrix() - B.matrix() * A.matrix();
  const double scale =
      std::max(1.0, A.frobenius_norm() * B.frobenius_norm());
  return comm.norm() <= t * scale;
}

std::vector<double> spectrum(const HermitianOperator& A) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(A.matrix(),
                                            Eigen::EigenvaluesOnly);
  std::vector<double> vals(es.eigenvalues().data(),
                           es.eigenvalues().data() + A.dim());
  std::sort(vals.begin(), vals.end());
  return cluster_sorted(std::move(vals), cluster_threshold(A));
}

JointSpectrum joint_spectrum(const std::vector<HermitianOperator>& ops,
                             double tol) {
  if (ops.empty()) throw PreconditionError("joint_spectrum: empty family");
  const Eigen::Index d = ops[0].dim();
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (ops[i].dim() != d) {
      throw DimensionMismatchError("joint_spectrum: operand dimensions differ");
    }
  }
  for (std::size_t i = 0; i < ops.size(); ++i) {
    for (std::size_t j = i + 1; j < ops.size(); ++j) {
      if (!commute(ops[i], ops[j], tol)) {
        std::ostringstream os;
        os << "joint_spectrum: operators " << i << " and " << j
           << " do not commute";
        throw NonCommutingError(os.str());
      }
    }
  }

  // Diagonalize a generic real combination of the family, then refine the
  // resulting eigenspace blocks operator by operator. The refinement pass
  // makes the result independent of whether the combination separated all
  // joint eigenspaces.
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);  // fixed: results are deterministic
  std::uniform_real_distribution<double> unif(0.25, 1.0);
  CMatrix combo = CMatrix::Zero(d, d);
  for (const auto& op : ops) {
    const double norm = std::max(1.0, op.frobenius_norm());
    combo += (unif(rng) / norm) * op.matrix();
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(combo);

  // Blocks are column ranges of a shared orthonormal basis.
  CMatrix basis = es.eigenvectors();
  std::vector<std::pair<Eigen::Index, Eigen::Index>> blocks;  // [begin, end)
  {
    const RVector& ev = es.eigenvalues();
    const double thr = 1e-8 * std::max(1.0, combo.norm());
    Eigen::Index begin = 0;
    for (Eigen::Index k = 1; k <= d; ++k) {
      if (k == d || ev[k] - ev[k - 1] >= thr) {
        blocks.emplace_back(begin, k);
        begin = k;
      }
    }
  }

  std::vector<std::vector<double>> block_values(blocks.size());
  for (const auto& op : ops) {
    const double thr = cluster_threshold(op);
    std::vector<std::pair<Eigen::Index, Eigen::Index>> refined;
    std::vector<std::vector<double>> refined_values;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const auto [begin, end] = blocks[b];
      const Eigen::Index w = end - begin;
      CMatrix sub = basis.middleCols(begin, w).adjoint() * op.matrix() *
                    basis.middleCols(begin, w);
      Eigen::SelfAdjointEigenSolver<CMatrix> sub_es(sub);
      basis.middleCols(begin, w) =
          (basis.middleCols(begin, w) * sub_es.eigenvectors()).eval();
      const RVector& ev = sub_es.eigenvalues();
      Eigen::Index sb = 0;
      for (Eigen::Index k = 1; k <= w; ++k) {
        if (k == w || ev[k] - ev[k - 1] >= thr) {
          double mean = ev.segment(sb, k - sb).mean();
          refined.emplace_back(begin + sb, begin + k);
          refined_values.push_back(block_values[b]);
          refined_values.back().push_back(mean);
          sb = k;
        }
      }
    }
    blocks = std::move(refined);
    block_values = std::move(refined_values);
  }

  JointSpectrum js;
  js.arity = static_cast<int>(ops.size());
  for (const auto& tuple : block_values) {
    js.points.push_back(
        Eigen::Map<const RVector>(tuple.data(), tuple.size()));
  }
  // Deduplicate within tolerance and order lexicographically.
  const double t = resolve_tol(tol);
  std::sort(js.points.begin(), js.points.end(),
            [](const RVector& a, const RVector& b) {
              return std::lexicographical_compare(a.data(), a.data() + a.size(),
                                                  b.data(), b.data() + b.size());
            });
  std::vector<RVector> dedup;
  for (const auto& p : js.points) {
    if (dedup.empty() ||
        (dedup.back() - p).lpNorm<Eigen::Infinity>() > std::max(t, 1e-8)) {
      dedup.push_back(p);
    }
  }
  js.points = std::move(dedup);
  return js;
}

JordanParts jordan_decompose(const HermitianOperator& A) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(A.matrix());
  const RVector& ev = es.eigenvalues();
  const CMatrix& V = es.eigenvectors();
  // Machine-noise band: eigenvalues this close to zero belong to the kernel.
  const double zero_band = 1e-14 * std::max(1.0, A.frobenius_norm());

  JordanParts parts;
  CMatrix pos = CMatrix::Zero(A.dim(), A.dim());
  CMatrix neg = CMatrix::Zero(A.dim(), A.dim());
  for (Eigen::Index k = 0; k < A.dim(); ++k) {
    if (ev[k] > zero_band) {
      parts.b += ev[k];
      pos += ev[k] * (V.col(k) * V.col(k).adjoint());
    } else if (ev[k] < -zero_band) {
      parts.c -= ev[k];
      neg -= ev[k] * (V.col(k) * V.col(k).adjoint());
    }
  }
  if (parts.b > 0.0) parts.B = HermitianOperator(pos / parts.b, A.tol());
  if (parts.c > 0.0) parts.C = HermitianOperator(neg / parts.c, A.tol());
  return parts;
}

double trace_norm(const HermitianOperator& A) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(A.matrix(),
                                            Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

HermitianOperator pauli_to_operator(const PauliForm& p, PauliKind kind,
                                    double tol) {
  const double t = resolve_tol(tol);
  CMatrix m;
  if (kind == PauliKind::kState) {
    if (p.x.norm() > 1.0 + t) {
      throw PreconditionError("state Bloch vector leaves the unit ball");
    }
    m = 0.5 * (CMatrix::Identity(2, 2) + p.x[0] * pauli_x() +
               p.x[1] * pauli_y() + p.x[2] * pauli_z());
  } else {
    if (p.x.norm() > p.w + t || p.w > 1.0 - p.x.norm() + t) {
      throw PreconditionError(
          "effect parameters violate ||p|| <= m <= 1 - ||p||");
    }
    m = p.w * CMatrix::Identity(2, 2) + p.x[0] * pauli_x() +
        p.x[1] * pauli_y() + p.x[2] * pauli_z();
  }
  return HermitianOperator(std::move(m), t);
}

PauliForm operator_to_pauli(const HermitianOperator& A, PauliKind kind) {
  if (A.dim() != 2) {
    throw DimensionMismatchError("operator_to_pauli: dimension must be 2");
  }
  const CMatrix& m = A.matrix();
  const double w = 0.5 * m.trace().real();
  Eigen::Vector3d v;
  v[0] = 0.5 * (m * pauli_x()).trace().real();
  v[1] = 0.5 * (m * pauli_y()).trace().real();
  v[2] = 0.5 * (m * pauli_z()).trace().real();

  PauliForm p;
  if (kind == PauliKind::kState) {
    if (std::abs(w - 0.5) > A.tol() + 1e-12) {
      throw PreconditionError("state must have trace 1");
    }
    p.w = 0.5;
    p.x = 2.0 * v;  // Bloch vector
    if (p.x.norm() > 1.0 + 1e-8) {
      throw PreconditionError("state Bloch vector leaves the unit ball");
    }
  } else {
    p.w = w;
    p.x = v;
    if (p.x.norm() > p.w + 1e-8 || p.w > 1.0 - p.x.norm() + 1e-8) {
      throw PreconditionError(
          "effect parameters violate ||p|| <= m <= 1 - ||p||");
    }
  }
  return p;
}

HermitianOperator tensor(const HermitianOperator& A,
                         const HermitianOperator& B) {
  const Eigen::Index da = A.dim(), db = B.dim();
  CMatrix out(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i) {
    for (Eigen::Index j = 0; j < da; ++j) {
      out.block(i * db, j * db, db, db) = A.matrix()(i, j) * B.matrix();
    }
  }
  return HermitianOperator(std::move(out),
                           std::min(A.tol(), B.tol()));
}

Ray embed_ray(const Ray& r, Eigen::Index bigger_dim, const CMatrix& frame) {
  if (bigger_dim < r.dim()) {
    throw DimensionMismatchError("embed_ray: target dimension too small");
  }
  if (frame.rows() != bigger_dim || frame.cols() < r.dim()) {
    throw DimensionMismatchError("embed_ray: frame shape mismatch");
  }
  const CMatrix used = frame.leftCols(r.dim());
  if ((used.adjoint() * used - CMatrix::Identity(r.dim(), r.dim())).norm() >
      1e-9) {
    throw PreconditionError("embed_ray: frame columns are not orthonormal");
  }
  return Ray(used * r.vector());
}

CMatrix standard_frame(Eigen::Index big_dim, Eigen::Index small_dim) {
  return CMatrix::Identity(big_dim, big_dim).leftCols(small_dim);
}

}  // namespace nogo
