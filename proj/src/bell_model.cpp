#include "nogo/bell_model.hpp"

#include <array>
#include <cmath>

namespace nogo {

HermitianOperator Observable2D::materialize() const {
  CMatrix m = a0 * CMatrix::Identity(2, 2) + a[0] * pauli_x() +
              a[1] * pauli_y() + a[2] * pauli_z();
  return HermitianOperator(std::move(m));
}

Eigen::Vector3d require_unit(const Eigen::Vector3d& v, double tol) {
  const double t = tol < 0.0 ? default_tolerance() : tol;
  if (std::abs(v.norm() - 1.0) > std::max(t, 1e-9)) {
    throw PreconditionError("vector must have unit length");
  }
  return v;
}

double assign_value(const BellConfig& cfg, const Observable2D& obs) {
  const double s = (cfg.m + cfg.n).dot(obs.a);
  return s >= 0.0 ? obs.a0 + obs.a.norm() : obs.a0 - obs.a.norm();
}

double expectation_exact(const Eigen::Vector3d& n, const Observable2D& obs) {
  return obs.a0 + obs.a.dot(n);
}

Eigen::Vector3d sample_sphere(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Vector3d v;
  do {
    v << normal(rng), normal(rng), normal(rng);
  } while (v.norm() < 1e-9);
  return v / v.norm();
}

MonteCarloEstimate expectation_monte_carlo(const Eigen::Vector3d& n,
                                           const Observable2D& obs,
                                           std::uint64_t samples,
                                           std::uint64_t seed) {
  if (samples < 1) throw PreconditionError("samples must be >= 1");
  require_unit(n);
  std::mt19937_64 rng(seed);
  const double plus = obs.a0 + obs.a.norm();
  double sum = 0.0, sum_sq = 0.0;
  std::uint64_t plus_count = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    BellConfig cfg{n, sample_sphere(rng)};
    const double v = assign_value(cfg, obs);
    sum += v;
    sum_sq += v * v;
    if (v == plus) ++plus_count;
  }
  MonteCarloEstimate est;
  const double ns = static_cast<double>(samples);
  est.mean = sum / ns;
  const double var = std::max(0.0, sum_sq / ns - est.mean * est.mean);
  est.std_error = std::sqrt(var / ns);
  est.plus_frequency = static_cast<double>(plus_count) / ns;
  return est;
}

bool check_value_map_property(const BellConfig& cfg, const Observable2D& obs1,
                              const Observable2D& obs2) {
  const double scale = std::max(1.0, obs1.a.norm() * obs2.a.norm());
  if (obs1.a.cross(obs2.a).norm() > 1e-9 * scale) {
    throw NonCommutingError(
        "observables commute only when their a-vectors are parallel or "
        "antiparallel");
  }
  const HermitianOperator A = obs1.materialize();
  const HermitianOperator B = obs2.materialize();
  const JointSpectrum js = joint_spectrum({A, B});
  Eigen::Vector2d v;
  v << assign_value(cfg, obs1), assign_value(cfg, obs2);
  return js.contains(v, 1e-8);
}

namespace {

void require_convex(
    const std::vector<std::pair<double, Eigen::Vector3d>>& mixture) {
  if (mixture.empty()) throw PreconditionError("mixture must be nonempty");
  double total = 0.0;
  for (const auto& [w, n] : mixture) {
    if (w < -1e-12) throw PreconditionError("mixture weights must be nonnegative");
    require_unit(n);
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw PreconditionError("mixture weights must sum to 1");
  }
}

}  // namespace

Eigen::Matrix3d second_moment_matrix(
    const std::vector<std::pair<double, Eigen::Vector3d>>& state_mixture) {
  require_convex(state_mixture);
  Eigen::Matrix3d out = Eigen::Matrix3d::Identity() / 3.0;
  for (const auto& [w, n] : state_mixture) {
    out += w * (n * n.transpose());
  }
  return out;
}

Eigen::Matrix3d second_moment_matrix_monte_carlo(
    const std::vector<std::pair<double, Eigen::Vector3d>>& state_mixture,
    std::uint64_t samples, std::uint64_t seed) {
  require_convex(state_mixture);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  // Unbiased estimator with standard variance reduction: the mixture is
  // stratified (w_i * samples per component), the polar coordinate of m is
  // stratified over its quantiles, and each draw contributes the antithetic
  // group +-m at azimuth phi and phi + pi/2.
  Eigen::Matrix3d sum = Eigen::Matrix3d::Zero();
  std::uint64_t used = 0;
  for (std::size_t k = 0; k < state_mixture.size(); ++k) {
    const auto& [w, n] = state_mixture[k];
    std::uint64_t quota =
        k + 1 == state_mixture.size()
            ? samples - used
            : static_cast<std::uint64_t>(std::llround(
                  w * static_cast<double>(samples)));
    quota = std::min(quota, samples - used);
    used += quota;
    const std::uint64_t draws = (quota + 7) / 8;
    std::uint64_t produced = 0;
    for (std::uint64_t i = 0; i < draws; ++i) {
      const double z =
          -1.0 + 2.0 * (static_cast<double>(i) + unif(rng)) /
                     static_cast<double>(draws);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = 2.0 * M_PI * unif(rng);
      const double c = r * std::cos(phi), s = r * std::sin(phi);
      const std::array<Eigen::Vector3d, 8> group{
          Eigen::Vector3d{c, s, z},   Eigen::Vector3d{-c, -s, -z},
          Eigen::Vector3d{c, s, -z},  Eigen::Vector3d{-c, -s, z},
          Eigen::Vector3d{-s, c, z},  Eigen::Vector3d{s, -c, -z},
          Eigen::Vector3d{-s, c, -z}, Eigen::Vector3d{s, -c, z}};
      for (const Eigen::Vector3d& m : group) {
        if (produced == quota) break;
        const Eigen::Vector3d lambda = n + m;
        sum += lambda * lambda.transpose();
        ++produced;
      }
    }
  }
  return sum / static_cast<double>(samples);
}

double trivial_state_model(const HermitianOperator& effect,
                           const CVector& psi) {
  const std::vector<double> spec = spectrum(effect);
  if (spec.front() < -1e-8 || spec.back() > 1.0 + 1e-8) {
    throw PreconditionError("operator is not an effect");
  }
  if (std::abs(psi.norm() - 1.0) > 1e-9) {
    throw PreconditionError("state must be a unit vector");
  }
  return (psi.adjoint() * effect.matrix() * psi)(0, 0).real();
}

}  // namespace nogo
