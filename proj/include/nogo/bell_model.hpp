#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "nogo/operator_core.hpp"

namespace nogo {

/// Hidden-variable configuration for a dim-2 pure state: n is the state
/// direction, m labels the hidden sub-ensemble. Both are unit 3-vectors.
struct BellConfig {
  Eigen::Vector3d n;
  Eigen::Vector3d m;
};

/// Observable a0*I + a.sigma with eigenvalues a0 +/- ||a||.
struct Observable2D {
  double a0 = 0.0;
  Eigen::Vector3d a = Eigen::Vector3d::Zero();

  HermitianOperator materialize() const;
};

/// Validates that a 3-vector is unit length within tol.
Eigen::Vector3d require_unit(const Eigen::Vector3d& v, double tol = -1.0);

/// The deterministic value of the observable in the sub-ensemble (n, m):
/// a0 + ||a|| if (m + n) . a >= 0, else a0 - ||a||. Ties take the + branch.
double assign_value(const BellConfig& cfg, const Observable2D& obs);

/// Quantum expectation a0 + a . n.
double expectation_exact(const Eigen::Vector3d& n, const Observable2D& obs);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  // Frequency of the a0 + ||a|| branch; exact value is (1 + a_hat . n)/2.
  double plus_frequency = 0.0;
};

/// Mean of assign_value over i.i.d. uniform m on the unit sphere;
/// deterministic given the seed.
MonteCarloEstimate expectation_monte_carlo(const Eigen::Vector3d& n,
                                           const Observable2D& obs,
                                           std::uint64_t samples,
                                           std::uint64_t seed);

/// Uniform point on S^2 (normalized 3-d standard Gaussians).
Eigen::Vector3d sample_sphere(std::mt19937_64& rng);

/// True iff (assign_value(obs1), assign_value(obs2)) lies in the joint
/// spectrum of the two materialized operators. Throws NonCommutingError
/// unless the a-vectors are parallel, antiparallel, or one vanishes.
bool check_value_map_property(const BellConfig& cfg, const Observable2D& obs1,
                              const Observable2D& obs2);

/// E[(n + m)(n + m)^T] for n drawn from the mixture and m uniform on S^2;
/// closed form sum_i w_i n_i n_i^T + I/3. Weights must be convex.
Eigen::Matrix3d second_moment_matrix(
    const std::vector<std::pair<double, Eigen::Vector3d>>& state_mixture);

/// Monte Carlo counterpart of second_moment_matrix.
Eigen::Matrix3d second_moment_matrix_monte_carlo(
    const std::vector<std::pair<double, Eigen::Vector3d>>& state_mixture,
    std::uint64_t samples, std::uint64_t seed);

/// The trivial model that takes the quantum state itself as hidden variable:
/// returns <psi|E|psi>. E must be an effect (spectrum within [0,1]).
double trivial_state_model(const HermitianOperator& effect, const CVector& psi);

}  // namespace nogo
