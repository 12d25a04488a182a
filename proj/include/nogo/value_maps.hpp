#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nogo/operator_core.hpp"

namespace nogo {

/// Finite list of rays with derived orthogonality graph and the list of
/// maximal mutually-orthogonal index sets. A basis is "complete" iff its size
/// equals the dimension.
struct RaySet {
  Eigen::Index dim = 0;
  std::vector<Ray> rays;
  std::vector<std::vector<bool>> adjacency;
  std::vector<std::vector<int>> bases;  // maximal cliques, sorted; list sorted
  double tol = 1e-10;

  bool is_complete(const std::vector<int>& basis) const {
    return static_cast<Eigen::Index>(basis.size()) == dim;
  }
};

/// Builds the orthogonality graph (edge iff |<r_i,r_j>| <= tol, i != j) and
/// enumerates all maximal cliques.
RaySet make_ray_set(Eigen::Index dim, std::vector<Ray> rays, double tol = -1.0);

/// Finite set of projections of arbitrary rank with the same derived
/// structure; a clique is complete iff its ranks sum to the dimension.
struct ProjectionSet {
  Eigen::Index dim = 0;
  std::vector<HermitianOperator> projections;
  std::vector<int> ranks;
  std::vector<std::vector<bool>> adjacency;  // edge iff P_i P_j = 0
  std::vector<std::vector<int>> bases;       // maximal cliques
  double tol = 1e-10;
};

ProjectionSet make_projection_set(Eigen::Index dim,
                                  std::vector<HermitianOperator> projections,
                                  double tol = -1.0);

/// Boolean variables (one per ray/projection) plus the clause families derived
/// from joint spectra of the commuting subfamilies:
///   (a) at-most-one-true per orthogonal pair,
///   (b) exactly-one-true per complete maximal orthogonal set,
///   (c) at-most-one-true per incomplete maximal orthogonal set.
struct ValueConstraintSystem {
  int num_vars = 0;
  std::vector<std::pair<int, int>> pair_clauses;
  std::vector<std::vector<int>> exactly_one_clauses;
  std::vector<std::vector<int>> at_most_one_clauses;
};

/// Throws PreconditionError listing indices if two rays coincide as rays.
ValueConstraintSystem compile(const RaySet& rs);
ValueConstraintSystem compile(const ProjectionSet& ps);

/// Map from variable index to {0,1}.
struct ValueAssignment {
  std::vector<std::uint8_t> values;
};

enum class SearchMethod { kBacktracking, kExhaustive };

struct SearchOptions {
  SearchMethod method = SearchMethod::kBacktracking;
  std::uint64_t node_budget = 100'000'000;
  // Optional pinned variables (index, value); search only explores extensions.
  std::vector<std::pair<int, int>> pinned;
};

enum class SearchVerdict { kAssignment, kNone, kBudgetExceeded };

struct SearchResult {
  SearchVerdict verdict = SearchVerdict::kNone;
  std::optional<ValueAssignment> assignment;
  std::uint64_t nodes = 0;
};

/// Decides satisfiability of the clause system. kNone is returned only after
/// the search space is exhausted; running out of budget is reported as
/// kBudgetExceeded, never as kNone. When an assignment exists, the one
/// returned is the lexicographically least satisfying assignment under the
/// fixed variable order (descending basis-membership count, ties by index).
SearchResult find_value_map(const ValueConstraintSystem& vcs,
                            const SearchOptions& options = {});

struct ClauseViolation {
  std::string family;           // "pair", "exactly-one", "at-most-one"
  std::vector<int> indices;     // the commuting family's variable indices
};

struct VerifyResult {
  bool ok = false;
  std::optional<ClauseViolation> violation;  // first violated clause
};

/// Checks an assignment against every clause of compile(rs); throws
/// PreconditionError if the assignment does not cover all rays.
VerifyResult verify_value_map(const RaySet& rs, const ValueAssignment& va);

/// One induction step d -> d+1 of the dimension lift, iterated until
/// target_dim: embed a copy of the set into the complement of the last frame
/// vector psi and adjoin |psi><psi| (O1); repeat with the first frame vector
/// psi' orthogonal to psi (O2); the result is O1 union O2, deduplicated.
/// The input must be certified unsatisfiable, and every step's output is
/// re-certified by search; a colorable input throws PreconditionError and an
/// exhausted budget throws BudgetExceededError.
RaySet lift_dimension(const RaySet& rs, Eigen::Index target_dim,
                      std::uint64_t node_budget = 100'000'000);

/// Replaces each rank-1 projection P by P (x) I_k; the compiled constraint
/// system is isomorphic to the input's.
ProjectionSet tensor_lift(const RaySet& rs, int k);

}  // namespace nogo
