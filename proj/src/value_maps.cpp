#include "nogo/value_maps.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace nogo {

namespace {

// All maximal cliques of an undirected graph, Bron-Kerbosch with pivoting.
// Deterministic: vertices are scanned in index order, output cliques are
// sorted and the clique list is ordered lexicographically.
class MaximalCliques {
 public:
  explicit MaximalCliques(const std::vector<std::vector<bool>>& adj)
      : adj_(adj), n_(static_cast<int>(adj.size())) {}

  std::vector<std::vector<int>> run() {
    std::vector<int> p(n_);
    std::iota(p.begin(), p.end(), 0);
    expand({}, std::move(p), {});
    std::sort(out_.begin(), out_.end());
    return std::move(out_);
  }

 private:
  void expand(std::vector<int> r, std::vector<int> p, std::vector<int> x) {
    if (p.empty() && x.empty()) {
      std::sort(r.begin(), r.end());
      out_.push_back(std::move(r));
      return;
    }
    int pivot = -1, best = -1;
    for (int u : p) {
      int deg = count_neighbors(u, p);
      if (deg > best) best = deg, pivot = u;
    }
    for (int u : x) {
      int deg = count_neighbors(u, p);
      if (deg > best) best = deg, pivot = u;
    }
    std::vector<int> candidates;
    for (int v : p) {
      if (pivot < 0 || !adj_[pivot][v]) candidates.push_back(v);
    }
    for (int v : candidates) {
      std::vector<int> r2 = r;
      r2.push_back(v);
      std::vector<int> p2, x2;
      for (int w : p) {
        if (adj_[v][w]) p2.push_back(w);
      }
      for (int w : x) {
        if (adj_[v][w]) x2.push_back(w);
      }
      expand(std::move(r2), std::move(p2), std::move(x2));
      p.erase(std::find(p.begin(), p.end(), v));
      x.push_back(v);
    }
  }

  int count_neighbors(int u, const std::vector<int>& p) const {
    int c = 0;
    for (int v : p) c += adj_[u][v] ? 1 : 0;
    return c;
  }

  const std::vector<std::vector<bool>>& adj_;
  int n_;
  std::vector<std::vector<int>> out_;
};

ValueConstraintSystem build_constraints(Eigen::Index dim,
                                        const std::vector<std::vector<bool>>& adj,
                                        const std::vector<int>& ranks,
                                        const std::vector<std::vector<int>>& cliques) {
  ValueConstraintSystem vcs;
  vcs.num_vars = static_cast<int>(adj.size());
  for (int i = 0; i < vcs.num_vars; ++i) {
    for (int j = i + 1; j < vcs.num_vars; ++j) {
      if (adj[i][j]) vcs.pair_clauses.emplace_back(i, j);
    }
  }
  for (const auto& c : cliques) {
    int rank_sum = 0;
    for (int v : c) rank_sum += ranks[v];
    if (rank_sum == dim) {
      vcs.exactly_one_clauses.push_back(c);
    } else {
      vcs.at_most_one_clauses.push_back(c);
    }
  }
  return vcs;
}

// Variable order: descending complete-basis membership count, ties by index.
std::vector<int> search_order(const ValueConstraintSystem& vcs) {
  std::vector<int> count(vcs.num_vars, 0);
  for (const auto& c : vcs.exactly_one_clauses) {
    for (int v : c) ++count[v];
  }
  std::vector<int> order(vcs.num_vars);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return count[a] != count[b] ? count[a] > count[b] : a < b;
  });
  return order;
}

struct ClauseIndex {
  // For each variable, the clauses it participates in.
  std::vector<std::vector<int>> pair_of;         // indices into pair_clauses
  std::vector<std::vector<int>> exactly_of;      // indices into exactly_one
  std::vector<std::vector<int>> at_most_of;      // indices into at_most_one
};

ClauseIndex index_clauses(const ValueConstraintSystem& vcs) {
  ClauseIndex ci;
  ci.pair_of.resize(vcs.num_vars);
  ci.exactly_of.resize(vcs.num_vars);
  ci.at_most_of.resize(vcs.num_vars);
  for (std::size_t k = 0; k < vcs.pair_clauses.size(); ++k) {
    ci.pair_of[vcs.pair_clauses[k].first].push_back(static_cast<int>(k));
    ci.pair_of[vcs.pair_clauses[k].second].push_back(static_cast<int>(k));
  }
  for (std::size_t k = 0; k < vcs.exactly_one_clauses.size(); ++k) {
    for (int v : vcs.exactly_one_clauses[k]) {
      ci.exactly_of[v].push_back(static_cast<int>(k));
    }
  }
  for (std::size_t k = 0; k < vcs.at_most_one_clauses.size(); ++k) {
    for (int v : vcs.at_most_one_clauses[k]) {
      ci.at_most_of[v].push_back(static_cast<int>(k));
    }
  }
  return ci;
}

bool assignment_satisfies(const ValueConstraintSystem& vcs,
                          const std::vector<std::uint8_t>& val) {
  for (const auto& [i, j] : vcs.pair_clauses) {
    if (val[i] && val[j]) return false;
  }
  for (const auto& c : vcs.exactly_one_clauses) {
    int ones = 0;
    for (int v : c) ones += val[v];
    if (ones != 1) return false;
  }
  for (const auto& c : vcs.at_most_one_clauses) {
    int ones = 0;
    for (int v : c) ones += val[v];
    if (ones > 1) return false;
  }
  return true;
}

SearchResult backtracking_search(const ValueConstraintSystem& vcs,
                                 const SearchOptions& options) {
  const std::vector<int> order = search_order(vcs);
  const ClauseIndex ci = index_clauses(vcs);
  const int n = vcs.num_vars;

  std::vector<int> val(n, -1);
  for (const auto& [v, b] : options.pinned) val[v] = b;

  // Incremental clause counters.
  std::vector<int> exactly_ones(vcs.exactly_one_clauses.size(), 0);
  std::vector<int> exactly_unassigned(vcs.exactly_one_clauses.size());
  for (std::size_t k = 0; k < vcs.exactly_one_clauses.size(); ++k) {
    exactly_unassigned[k] = static_cast<int>(vcs.exactly_one_clauses[k].size());
  }
  std::vector<int> at_most_ones(vcs.at_most_one_clauses.size(), 0);

  SearchResult result;
  std::uint64_t nodes = 0;

  // Returns false on clause violation after assigning variable v.
  auto assign = [&](int v, int b) -> bool {
    val[v] = b;
    bool ok = true;
    if (b == 1) {
      for (int k : ci.pair_of[v]) {
        const auto& [i, j] = vcs.pair_clauses[k];
        int other = (i == v) ? j : i;
        if (val[other] == 1) ok = false;
      }
      for (int k : ci.at_most_of[v]) {
        if (++at_most_ones[k] > 1) ok = false;
      }
      for (int k : ci.exactly_of[v]) {
        --exactly_unassigned[k];
        if (++exactly_ones[k] > 1) ok = false;
      }
    } else {
      for (int k : ci.exactly_of[v]) {
        --exactly_unassigned[k];
        if (exactly_unassigned[k] == 0 && exactly_ones[k] == 0) ok = false;
      }
    }
    return ok;
  };
  auto unassign = [&](int v, int b) {
    val[v] = -1;
    if (b == 1) {
      for (int k : ci.at_most_of[v]) --at_most_ones[k];
      for (int k : ci.exactly_of[v]) {
        ++exactly_unassigned[k];
        --exactly_ones[k];
      }
    } else {
      for (int k : ci.exactly_of[v]) ++exactly_unassigned[k];
    }
  };

  // Apply pinned values through the same bookkeeping.
  for (const auto& [v, b] : options.pinned) {
    val[v] = -1;
    if (!assign(v, b)) {
      result.verdict = SearchVerdict::kNone;
      result.nodes = 0;
      return result;
    }
  }

  std::vector<int> free_order;
  for (int v : order) {
    bool pinned = false;
    for (const auto& [pv, pb] : options.pinned) {
      if (pv == v) pinned = true;
    }
    if (!pinned) free_order.push_back(v);
  }

  // Iterative DFS, value 0 tried before 1 (lexicographically least result).
  enum class Verdict { kFound, kNone, kBudget };
  auto dfs = [&]() -> Verdict {
    std::vector<int> branch(free_order.size(), -1);  // value tried at depth
    std::size_t depth = 0;
    while (true) {
      if (depth == free_order.size()) return Verdict::kFound;
      int v = free_order[depth];
      int next = branch[depth] + 1;
      if (next > 1) {
        branch[depth] = -1;
        if (depth == 0) return Verdict::kNone;
        --depth;
        unassign(free_order[depth], branch[depth]);
        continue;
      }
      branch[depth] = next;
      if (++nodes > options.node_budget) return Verdict::kBudget;
      if (assign(v, next)) {
        ++depth;
      } else {
        unassign(v, next);
      }
    }
  };

  switch (dfs()) {
    case Verdict::kFound: {
      result.verdict = SearchVerdict::kAssignment;
      ValueAssignment va;
      va.values.assign(val.begin(), val.end());
      result.assignment = std::move(va);
      break;
    }
    case Verdict::kNone:
      result.verdict = SearchVerdict::kNone;
      break;
    case Verdict::kBudget:
      result.verdict = SearchVerdict::kBudgetExceeded;
      break;
  }
  result.nodes = nodes;
  return result;
}

SearchResult exhaustive_search(const ValueConstraintSystem& vcs,
                               const SearchOptions& options) {
  const std::vector<int> order = search_order(vcs);
  const int n = vcs.num_vars;
  SearchResult result;

  if (n >= 63) {
    result.verdict = SearchVerdict::kBudgetExceeded;
    return result;
  }
  const std::uint64_t total = 1ull << n;
  std::vector<std::uint8_t> val(n, 0);
  std::uint64_t nodes = 0;
  for (std::uint64_t code = 0; code < total; ++code) {
    if (++nodes > options.node_budget) {
      result.verdict = SearchVerdict::kBudgetExceeded;
      result.nodes = nodes;
      return result;
    }
    // order[0] is the most significant bit: increasing code enumerates
    // assignments in lexicographic order of the fixed variable order.
    for (int k = 0; k < n; ++k) {
      val[order[k]] = (code >> (n - 1 - k)) & 1ull;
    }
    bool pin_ok = true;
    for (const auto& [v, b] : options.pinned) {
      if (val[v] != b) pin_ok = false;
    }
    if (!pin_ok) continue;
    if (assignment_satisfies(vcs, val)) {
      result.verdict = SearchVerdict::kAssignment;
      ValueAssignment va;
      va.values = val;
      result.assignment = std::move(va);
      result.nodes = nodes;
      return result;
    }
  }
  result.verdict = SearchVerdict::kNone;
  result.nodes = nodes;
  return result;
}

std::vector<std::vector<bool>> ray_adjacency(const std::vector<Ray>& rays,
                                             double tol) {
  const int n = static_cast<int>(rays.size());
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(rays[i].vector().dot(rays[j].vector())) <= tol) {
        adj[i][j] = adj[j][i] = true;
      }
    }
  }
  return adj;
}

}  // namespace

RaySet make_ray_set(Eigen::Index dim, std::vector<Ray> rays, double tol) {
  RaySet rs;
  rs.dim = dim;
  rs.tol = tol < 0.0 ? default_tolerance() : tol;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    if (rays[i].dim() != dim) {
      std::ostringstream os;
      os << "ray " << i << " has dimension " << rays[i].dim()
         << ", expected " << dim;
      throw DimensionMismatchError(os.str());
    }
  }
  rs.rays = std::move(rays);
  rs.adjacency = ray_adjacency(rs.rays, std::max(rs.tol, 1e-12));
  rs.bases = MaximalCliques(rs.adjacency).run();
  return rs;
}

ProjectionSet make_projection_set(Eigen::Index dim,
                                  std::vector<HermitianOperator> projections,
                                  double tol) {
  ProjectionSet ps;
  ps.dim = dim;
  ps.tol = tol < 0.0 ? default_tolerance() : tol;
  const int n = static_cast<int>(projections.size());
  for (int i = 0; i < n; ++i) {
    const auto& P = projections[i];
    if (P.dim() != dim) {
      throw DimensionMismatchError("projection dimension mismatch");
    }
    if ((P.matrix() * P.matrix() - P.matrix()).norm() > 1e-8) {
      std::ostringstream os;
      os << "operator " << i << " is not a projection";
      throw PreconditionError(os.str());
    }
    ps.ranks.push_back(static_cast<int>(std::lround(P.trace())));
  }
  ps.projections = std::move(projections);
  ps.adjacency.assign(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double prod =
          (ps.projections[i].matrix() * ps.projections[j].matrix()).norm();
      if (prod <= std::max(ps.tol, 1e-9)) {
        ps.adjacency[i][j] = ps.adjacency[j][i] = true;
      }
    }
  }
  ps.bases = MaximalCliques(ps.adjacency).run();
  return ps;
}

ValueConstraintSystem compile(const RaySet& rs) {
  for (std::size_t i = 0; i < rs.rays.size(); ++i) {
    for (std::size_t j = i + 1; j < rs.rays.size(); ++j) {
      if (same_ray(rs.rays[i], rs.rays[j])) {
        std::ostringstream os;
        os << "duplicate rays at indices " << i << " and " << j;
        throw PreconditionError(os.str());
      }
    }
  }
  std::vector<int> ranks(rs.rays.size(), 1);
  return build_constraints(rs.dim, rs.adjacency, ranks, rs.bases);
}

ValueConstraintSystem compile(const ProjectionSet& ps) {
  for (std::size_t i = 0; i < ps.projections.size(); ++i) {
    for (std::size_t j = i + 1; j < ps.projections.size(); ++j) {
      if ((ps.projections[i].matrix() - ps.projections[j].matrix()).norm() <=
          1e-9) {
        std::ostringstream os;
        os << "duplicate projections at indices " << i << " and " << j;
        throw PreconditionError(os.str());
      }
    }
  }
  return build_constraints(ps.dim, ps.adjacency, ps.ranks, ps.bases);
}

SearchResult find_value_map(const ValueConstraintSystem& vcs,
                            const SearchOptions& options) {
  if (options.method == SearchMethod::kBacktracking) {
    return backtracking_search(vcs, options);
  }
  return exhaustive_search(vcs, options);
}

VerifyResult verify_value_map(const RaySet& rs, const ValueAssignment& va) {
  if (va.values.size() != rs.rays.size()) {
    throw PreconditionError("assignment does not cover all rays");
  }
  const ValueConstraintSystem vcs = compile(rs);
  VerifyResult out;
  for (const auto& [i, j] : vcs.pair_clauses) {
    if (va.values[i] && va.values[j]) {
      out.violation = ClauseViolation{"pair", {i, j}};
      return out;
    }
  }
  for (const auto& c : vcs.exactly_one_clauses) {
    int ones = 0;
    for (int v : c) ones += va.values[v];
    if (ones != 1) {
      out.violation = ClauseViolation{"exactly-one", c};
      return out;
    }
  }
  for (const auto& c : vcs.at_most_one_clauses) {
    int ones = 0;
    for (int v : c) ones += va.values[v];
    if (ones > 1) {
      out.violation = ClauseViolation{"at-most-one", c};
      return out;
    }
  }
  out.ok = true;
  return out;
}

namespace {

// Certify that a ray set admits no value map; throws otherwise.
void certify_none(const RaySet& rs, std::uint64_t budget, const char* what) {
  SearchOptions opt;
  opt.method = SearchMethod::kBacktracking;
  opt.node_budget = budget;
  const SearchResult r = find_value_map(compile(rs), opt);
  if (r.verdict == SearchVerdict::kAssignment) {
    std::ostringstream os;
    os << what << ": set admits a value map (colorable)";
    throw PreconditionError(os.str());
  }
  if (r.verdict == SearchVerdict::kBudgetExceeded) {
    std::ostringstream os;
    os << what << ": certification exceeded the node budget";
    throw BudgetExceededError(os.str());
  }
}

RaySet lift_once(const RaySet& rs, std::uint64_t budget) {
  const Eigen::Index d = rs.dim;
  std::vector<Ray> out;
  auto push_unique = [&](Ray r) {
    for (const auto& existing : out) {
      if (same_ray(existing, r)) return;
    }
    out.push_back(std::move(r));
  };

  // O1: copy into the complement of psi = e_{d+1}, then adjoin psi.
  for (const auto& r : rs.rays) {
    CVector v = CVector::Zero(d + 1);
    v.head(d) = r.vector();
    push_unique(Ray(std::move(v)));
  }
  CVector psi = CVector::Zero(d + 1);
  psi[d] = 1.0;
  push_unique(Ray(std::move(psi)));

  // O2: copy into the complement of psi' = e_1, then adjoin psi'.
  for (const auto& r : rs.rays) {
    CVector v = CVector::Zero(d + 1);
    v.tail(d) = r.vector();
    push_unique(Ray(std::move(v)));
  }
  CVector psi2 = CVector::Zero(d + 1);
  psi2[0] = 1.0;
  push_unique(Ray(std::move(psi2)));

  RaySet lifted = make_ray_set(d + 1, std::move(out), rs.tol);
  certify_none(lifted, budget, "lift_dimension output");
  return lifted;
}

}  // namespace

RaySet lift_dimension(const RaySet& rs, Eigen::Index target_dim,
                      std::uint64_t node_budget) {
  if (target_dim <= rs.dim) {
    throw PreconditionError("lift_dimension: target dimension must exceed input");
  }
  certify_none(rs, node_budget, "lift_dimension input");
  RaySet current = rs;
  while (current.dim < target_dim) {
    current = lift_once(current, node_budget);
  }
  return current;
}

ProjectionSet tensor_lift(const RaySet& rs, int k) {
  if (k < 1) throw PreconditionError("tensor_lift: k must be positive");
  const HermitianOperator eye(CMatrix::Identity(k, k));
  std::vector<HermitianOperator> projections;
  projections.reserve(rs.rays.size());
  for (const auto& r : rs.rays) {
    projections.push_back(tensor(r.projector(), eye));
  }
  return make_projection_set(rs.dim * k, std::move(projections), rs.tol);
}

}  // namespace nogo
