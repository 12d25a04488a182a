#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "nogo/operator_core.hpp"

namespace nogo {

/// Finite sample of a function: points in R^d (rows) with matching values in
/// R^e (rows).
struct PointSample {
  Eigen::MatrixXd points;
  Eigen::MatrixXd values;
};

/// A weighted combination of sample indices; weights sum to 1 (affine) and
/// may be negative.
using AffineCombination = std::vector<std::pair<int, double>>;

/// Two affine combinations of sample points that agree as points but
/// disagree as values: the witness that no translated-linear extension
/// exists.
struct AffineWitness {
  AffineCombination combo_a;
  AffineCombination combo_b;
};

/// Evaluates a combination over the sample: (combined point, combined value).
std::pair<Eigen::VectorXd, Eigen::VectorXd> evaluate_combination(
    const PointSample& ps, const AffineCombination& combo);

/// f(v) = w0 + h(v - u0), with h linear on the subspace L parallel to the
/// affine hull of the sample points. Off L, evaluation uses the zero
/// completion, which is one arbitrary choice among many; hull_distance
/// reports how far a query point is from u0 + L.
struct TranslatedLinearMap {
  Eigen::VectorXd u0;
  Eigen::VectorXd w0;
  Eigen::MatrixXd hull_basis;  // d x r, orthonormal columns spanning L
  Eigen::MatrixXd h;           // e x r coefficients of the linear part

  Eigen::VectorXd evaluate(const Eigen::VectorXd& v) const;
  double hull_distance(const Eigen::VectorXd& v) const;
};

/// u0 = first point; orthonormal basis of L = Aff(points) - u0 via
/// rank-revealing SVD of the difference vectors (relative threshold
/// 1e-9 * sigma_max).
std::pair<Eigen::VectorXd, Eigen::MatrixXd> affine_hull_basis(
    const Eigen::MatrixXd& points);

/// The unique translated-linear extension when the graph's affine hull is a
/// function graph, otherwise the violating pair of affine combinations.
std::variant<TranslatedLinearMap, AffineWitness> extend_translated_linear(
    const PointSample& ps);

struct ConvexLinearCheck {
  bool ok = false;
  std::optional<AffineWitness> witness;  // first violated combination
};

/// Exact check on all pairwise midpoints that are present among the sample
/// points, then the extension rank test, then randomized convex combinations
/// re-evaluated through the candidate extension.
ConvexLinearCheck is_convex_linear(const PointSample& ps, int trials = 100,
                                   std::uint64_t seed = 0);

}  // namespace nogo
