#include "nogo/convex_linear.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <random>

namespace nogo {

namespace {

constexpr double kRankThreshold = 1e-9;

void require_sample(const PointSample& ps) {
  if (ps.points.rows() < 1 || ps.points.rows() != ps.values.rows()) {
    throw PreconditionError("point sample must pair every point with a value");
  }
  if (ps.points.cols() < 1 || ps.values.cols() < 1) {
    throw PreconditionError("point and value dimensions must be >= 1");
  }
}

}  // namespace

std::pair<Eigen::VectorXd, Eigen::VectorXd> evaluate_combination(
    const PointSample& ps, const AffineCombination& combo) {
  Eigen::VectorXd point = Eigen::VectorXd::Zero(ps.points.cols());
  Eigen::VectorXd value = Eigen::VectorXd::Zero(ps.values.cols());
  for (const auto& [idx, coeff] : combo) {
    point += coeff * ps.points.row(idx).transpose();
    value += coeff * ps.values.row(idx).transpose();
  }
  return {point, value};
}

Eigen::VectorXd TranslatedLinearMap::evaluate(const Eigen::VectorXd& v) const {
  return w0 + h * (hull_basis.transpose() * (v - u0));
}

double TranslatedLinearMap::hull_distance(const Eigen::VectorXd& v) const {
  const Eigen::VectorXd d = v - u0;
  return (d - hull_basis * (hull_basis.transpose() * d)).norm();
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> affine_hull_basis(
    const Eigen::MatrixXd& points) {
  if (points.rows() < 1) {
    throw PreconditionError("affine_hull_basis: need at least one point");
  }
  const Eigen::VectorXd u0 = points.row(0).transpose();
  const Eigen::Index n = points.rows(), d = points.cols();
  if (n == 1) return {u0, Eigen::MatrixXd::Zero(d, 0)};

  Eigen::MatrixXd diffs(n - 1, d);
  for (Eigen::Index i = 1; i < n; ++i) {
    diffs.row(i - 1) = points.row(i) - points.row(0);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(diffs, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double thr = sv.size() > 0 ? kRankThreshold * sv[0] : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv[k] > thr && sv[k] > 0.0) ++rank;
  }
  return {u0, svd.matrixV().leftCols(rank)};
}

std::variant<TranslatedLinearMap, AffineWitness> extend_translated_linear(
    const PointSample& ps) {
  require_sample(ps);
  const Eigen::Index n = ps.points.rows();
  const Eigen::Index d = ps.points.cols();
  const Eigen::Index e = ps.values.cols();

  auto [u0, basis] = affine_hull_basis(ps.points);
  const Eigen::VectorXd w0 = ps.values.row(0).transpose();

  if (n == 1) {
    return TranslatedLinearMap{u0, w0, Eigen::MatrixXd::Zero(d, 0),
                               Eigen::MatrixXd::Zero(e, 0)};
  }

  Eigen::MatrixXd dp(n - 1, d), dw(n - 1, e);
  for (Eigen::Index i = 1; i < n; ++i) {
    dp.row(i - 1) = ps.points.row(i) - ps.points.row(0);
    dw.row(i - 1) = ps.values.row(i) - ps.values.row(0);
  }

  // The graph's affine hull is a function graph iff no combination of point
  // differences vanishes while the matching value combination does not:
  // c in the left null space of dp must also annihilate dw.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(dp, Eigen::ComputeFullU |
                                                Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double scale = std::max({1.0, dp.norm(), dw.norm()});
  const double thr = sv.size() > 0 ? kRankThreshold * sv[0] : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv[k] > thr) ++rank;
  }

  int worst = -1;
  double worst_norm = kRankThreshold * scale;
  for (Eigen::Index k = rank; k < n - 1; ++k) {
    const double vn = (dw.transpose() * svd.matrixU().col(k)).norm();
    if (vn > worst_norm) {
      worst_norm = vn;
      worst = static_cast<int>(k);
    }
  }
  if (worst >= 0) {
    // Split the null combination into its positive and negative parts; each
    // becomes an affine combination after adding the base point.
    const Eigen::VectorXd c = svd.matrixU().col(worst);
    AffineWitness w;
    double pos_sum = 0.0, neg_sum = 0.0;
    for (Eigen::Index i = 0; i < n - 1; ++i) {
      if (c[i] > 0.0) {
        w.combo_a.emplace_back(static_cast<int>(i + 1), c[i]);
        pos_sum += c[i];
      } else if (c[i] < 0.0) {
        w.combo_b.emplace_back(static_cast<int>(i + 1), -c[i]);
        neg_sum += -c[i];
      }
    }
    w.combo_a.emplace_back(0, 1.0 - pos_sum);
    w.combo_b.emplace_back(0, 1.0 - neg_sum);
    return w;
  }

  // Function graph confirmed: solve for the linear part on the hull basis.
  TranslatedLinearMap map;
  map.u0 = u0;
  map.w0 = w0;
  map.hull_basis = basis;
  const Eigen::MatrixXd y = dp * basis;  // (n-1) x r, full column rank
  map.h = y.colPivHouseholderQr().solve(dw).transpose();  // e x r
  return map;
}

ConvexLinearCheck is_convex_linear(const PointSample& ps, int trials,
                                   std::uint64_t seed) {
  require_sample(ps);
  const Eigen::Index n = ps.points.rows();
  const double scale =
      std::max({1.0, ps.points.cwiseAbs().maxCoeff(),
                ps.values.cwiseAbs().maxCoeff()});

  // Pairwise midpoints that coincide with a sample point must carry the
  // average value.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Eigen::RowVectorXd mid = 0.5 * (ps.points.row(i) + ps.points.row(j));
      for (Eigen::Index k = 0; k < n; ++k) {
        if ((ps.points.row(k) - mid).norm() > 1e-9 * scale) continue;
        const Eigen::RowVectorXd avg =
            0.5 * (ps.values.row(i) + ps.values.row(j));
        if ((ps.values.row(k) - avg).norm() > 1e-8 * scale) {
          ConvexLinearCheck out;
          out.witness = AffineWitness{
              {{static_cast<int>(i), 0.5}, {static_cast<int>(j), 0.5}},
              {{static_cast<int>(k), 1.0}}};
          return out;
        }
      }
    }
  }

  auto extension = extend_translated_linear(ps);
  if (std::holds_alternative<AffineWitness>(extension)) {
    ConvexLinearCheck out;
    out.witness = std::get<AffineWitness>(extension);
    return out;
  }
  const auto& map = std::get<TranslatedLinearMap>(extension);

  // Randomized convex combinations re-evaluated through the extension.
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(n) - 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    const int k = 2 + static_cast<int>(pick(rng) % 3);
    AffineCombination combo;
    double total = 0.0;
    for (int s = 0; s < k; ++s) {
      const double wgt = unif(rng) + 1e-3;
      combo.emplace_back(pick(rng), wgt);
      total += wgt;
    }
    for (auto& [idx, wgt] : combo) wgt /= total;
    const auto [point, value] = evaluate_combination(ps, combo);
    if ((map.evaluate(point) - value).norm() > 1e-7 * scale) {
      ConvexLinearCheck out;
      out.witness = AffineWitness{combo, {}};
      return out;
    }
  }

  ConvexLinearCheck out;
  out.ok = true;
  return out;
}

}  // namespace nogo
