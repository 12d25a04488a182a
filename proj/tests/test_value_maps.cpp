#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "helpers.hpp"
#include "nogo/catalog_io.hpp"
#include "nogo/value_maps.hpp"

using namespace nogo;
using nogo::testing::make_rng;
using nogo::testing::random_unit_vector;
using nogo::testing::random_unitary;

namespace {

std::string data_path(const char* name) {
  return std::string(NOGO_DATA_DIR) + "/" + name;
}

std::vector<Ray> standard_basis_rays(int dim) {
  std::vector<Ray> rays;
  for (int k = 0; k < dim; ++k) {
    CVector v = CVector::Zero(dim);
    v[k] = 1.0;
    rays.emplace_back(std::move(v));
  }
  return rays;
}

// Independent colorability oracle, written from scratch: orthogonality from
// inner products, complete bases from subset enumeration (any pairwise
// orthogonal set of size dim spans), full enumeration of all 2^n assignments.
struct OracleOutcome {
  bool colorable = false;
  int complete_bases = 0;
};

OracleOutcome oracle_exhaustive(const std::vector<Ray>& rays, int dim) {
  const int n = static_cast<int>(rays.size());
  REQUIRE(n < 26);
  std::vector<std::vector<bool>> orth(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      orth[i][j] = orth[j][i] =
          std::abs(rays[i].vector().dot(rays[j].vector())) <= 1e-10;
    }
  }
  std::vector<std::uint32_t> basis_masks;
  std::vector<int> subset(dim);
  std::function<void(int, int)> rec = [&](int start, int k) {
    if (k == dim) {
      for (int a = 0; a < dim; ++a) {
        for (int b = a + 1; b < dim; ++b) {
          if (!orth[subset[a]][subset[b]]) return;
        }
      }
      std::uint32_t mask = 0;
      for (int a = 0; a < dim; ++a) mask |= 1u << subset[a];
      basis_masks.push_back(mask);
      return;
    }
    for (int v = start; v < n; ++v) {
      subset[k] = v;
      rec(v + 1, k + 1);
    }
  };
  rec(0, 0);

  OracleOutcome out;
  out.complete_bases = static_cast<int>(basis_masks.size());
  for (std::uint32_t a = 0; a < (1u << n); ++a) {
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      if (!(a & (1u << i))) continue;
      for (int j = i + 1; j < n && ok; ++j) {
        if ((a & (1u << j)) && orth[i][j]) ok = false;
      }
    }
    for (std::uint32_t mask : basis_masks) {
      if (!ok) break;
      if (std::popcount(a & mask) != 1) ok = false;
    }
    if (ok) {
      out.colorable = true;
      return out;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("compile clause families") {
  SUBCASE("standard basis of C^3: one exactly-one clause") {
    const RaySet rs = make_ray_set(3, standard_basis_rays(3));
    const ValueConstraintSystem vcs = compile(rs);
    CHECK(vcs.num_vars == 3);
    CHECK(vcs.pair_clauses.size() == 3);
    REQUIRE(vcs.exactly_one_clauses.size() == 1);
    CHECK(vcs.exactly_one_clauses[0] == std::vector<int>{0, 1, 2});
    CHECK(vcs.at_most_one_clauses.empty());
  }
  SUBCASE("non-spanning pair in C^3: at-most-one only") {
    std::vector<Ray> rays = standard_basis_rays(3);
    rays.pop_back();
    const ValueConstraintSystem vcs = compile(make_ray_set(3, rays));
    CHECK(vcs.pair_clauses.size() == 1);
    CHECK(vcs.exactly_one_clauses.empty());
    REQUIRE(vcs.at_most_one_clauses.size() == 1);
    CHECK(vcs.at_most_one_clauses[0] == std::vector<int>{0, 1});
  }
  SUBCASE("the bundled 18-ray catalog forms 9 complete bases") {
    const RayCatalog cat = load_ray_catalog(data_path("ks18_dim4.json"));
    const RaySet rs = cat.to_ray_set();
    const ValueConstraintSystem vcs = compile(rs);
    CHECK(vcs.num_vars == 18);
    CHECK(vcs.exactly_one_clauses.size() == 9);
    CHECK(vcs.pair_clauses.size() == 63);
    // Cross-check against the from-scratch subset enumeration.
    CHECK(oracle_exhaustive(rs.rays, 4).complete_bases == 9);
    // Every ray of this catalog sits in exactly two complete bases.
    std::vector<int> membership(18, 0);
    for (const auto& basis : vcs.exactly_one_clauses) {
      for (int v : basis) ++membership[v];
    }
    for (int v = 0; v < 18; ++v) CHECK(membership[v] == 2);
  }
  SUBCASE("the bundled 33-ray catalog structure") {
    const RayCatalog cat = load_ray_catalog(data_path("peres33_dim3.json"));
    const RaySet rs = cat.to_ray_set();
    const ValueConstraintSystem vcs = compile(rs);
    CHECK(vcs.num_vars == 33);
    CHECK(vcs.pair_clauses.size() == 72);
    CHECK(vcs.exactly_one_clauses.size() == 16);
    CHECK(vcs.at_most_one_clauses.size() == 24);
    // Independent recounts: complete bases by subset enumeration, edges by
    // inner products.
    int complete = 0;
    for (int i = 0; i < 33; ++i) {
      for (int j = i + 1; j < 33; ++j) {
        for (int k = j + 1; k < 33; ++k) {
          const auto& a = rs.rays[i].vector();
          const auto& b = rs.rays[j].vector();
          const auto& c = rs.rays[k].vector();
          if (std::abs(a.dot(b)) <= 1e-10 && std::abs(a.dot(c)) <= 1e-10 &&
              std::abs(b.dot(c)) <= 1e-10) {
            ++complete;
          }
        }
      }
    }
    CHECK(complete == 16);
  }
  SUBCASE("duplicate rays are reported with indices") {
    std::vector<Ray> rays = standard_basis_rays(3);
    CVector dup(3);
    dup << 0, 0, Complex(0, 1);  // same ray as e2 up to phase
    rays.emplace_back(std::move(dup));
    CHECK_THROWS_WITH_AS(compile(make_ray_set(3, rays)),
                         "duplicate rays at indices 2 and 3",
                         PreconditionError);
  }
}

TEST_CASE("find_value_map on elementary systems") {
  SUBCASE("standard basis is satisfiable; (1,0,0) is a valid map") {
    const RaySet rs = make_ray_set(3, standard_basis_rays(3));
    const ValueConstraintSystem vcs = compile(rs);
    CHECK(verify_value_map(rs, {{1, 0, 0}}).ok);
    for (SearchMethod m : {SearchMethod::kBacktracking, SearchMethod::kExhaustive}) {
      SearchOptions opt;
      opt.method = m;
      const SearchResult r = find_value_map(vcs, opt);
      REQUIRE(r.verdict == SearchVerdict::kAssignment);
      // Lexicographically least satisfying assignment under the fixed order.
      CHECK(r.assignment->values == std::vector<std::uint8_t>{0, 0, 1});
    }
  }
  SUBCASE("no complete basis: the all-zeros assignment is returned") {
    auto rng = make_rng(31);
    // Rays confined to a 3-dimensional subspace of C^4 never span.
    std::vector<Ray> rays;
    for (int k = 0; k < 6; ++k) {
      CVector v = CVector::Zero(4);
      v.head(3) = random_unit_vector(rng, 3);
      rays.emplace_back(std::move(v));
    }
    const RaySet rs = make_ray_set(4, rays);
    const ValueConstraintSystem vcs = compile(rs);
    CHECK(vcs.exactly_one_clauses.empty());
    const SearchResult r = find_value_map(vcs);
    REQUIRE(r.verdict == SearchVerdict::kAssignment);
    CHECK(std::count(r.assignment->values.begin(), r.assignment->values.end(),
                     1) == 0);
    CHECK(verify_value_map(rs, *r.assignment).ok);
  }
  SUBCASE("budget exhaustion is an explicit verdict, never NONE") {
    const RayCatalog cat = load_ray_catalog(data_path("ks18_dim4.json"));
    SearchOptions opt;
    opt.node_budget = 10;
    const SearchResult r = find_value_map(compile(cat.to_ray_set()), opt);
    CHECK(r.verdict == SearchVerdict::kBudgetExceeded);
  }
}

TEST_CASE("both bundled catalogs admit no value map") {
  SUBCASE("18 rays in dim 4, backtracking and exhaustive agree") {
    const RayCatalog cat = load_ray_catalog(data_path("ks18_dim4.json"));
    const RaySet rs = cat.to_ray_set();
    const ValueConstraintSystem vcs = compile(rs);
    SearchOptions opt;
    opt.method = SearchMethod::kBacktracking;
    CHECK(find_value_map(vcs, opt).verdict == SearchVerdict::kNone);
    opt.method = SearchMethod::kExhaustive;
    opt.node_budget = 1u << 20;
    CHECK(find_value_map(vcs, opt).verdict == SearchVerdict::kNone);
    // From-scratch oracle confirms.
    CHECK_FALSE(oracle_exhaustive(rs.rays, 4).colorable);
  }
  SUBCASE("33 rays in dim 3 by backtracking") {
    const RayCatalog cat = load_ray_catalog(data_path("peres33_dim3.json"));
    CHECK(find_value_map(compile(cat.to_ray_set())).verdict ==
          SearchVerdict::kNone);
  }
}

TEST_CASE("backtracking and exhaustive agree on random small instances") {
  auto rng = make_rng(32);
  std::uniform_int_distribution<int> extra(0, 6);
  int colorable_seen = 0, uncolorable_seen = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int dim = 3 + (trial % 2);
    // A few rotated copies of the standard basis plus random rays gives
    // instances rich in complete bases.
    std::vector<Ray> rays;
    const int copies = 1 + extra(rng) % 3;
    for (int c = 0; c < copies; ++c) {
      const CMatrix u = random_unitary(rng, dim);
      for (int k = 0; k < dim; ++k) rays.emplace_back(CVector(u.col(k)));
    }
    const int extras = extra(rng);
    for (int k = 0; k < extras; ++k) {
      rays.emplace_back(random_unit_vector(rng, dim));
    }
    while (rays.size() > 18) rays.pop_back();
    const ValueConstraintSystem vcs = compile(make_ray_set(dim, rays));

    SearchOptions opt;
    opt.method = SearchMethod::kBacktracking;
    const SearchResult bt = find_value_map(vcs, opt);
    opt.method = SearchMethod::kExhaustive;
    const SearchResult ex = find_value_map(vcs, opt);
    REQUIRE(bt.verdict == ex.verdict);
    if (bt.verdict == SearchVerdict::kAssignment) {
      ++colorable_seen;
      CHECK(bt.assignment->values == ex.assignment->values);
    } else {
      ++uncolorable_seen;
    }
  }
  CHECK(colorable_seen > 0);  // the generator hits both outcomes
}

TEST_CASE("pinned searches agree across methods") {
  auto rng = make_rng(36);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 3;
    std::vector<Ray> rays;
    const CMatrix u = random_unitary(rng, dim);
    const CMatrix v = random_unitary(rng, dim);
    for (int k = 0; k < dim; ++k) rays.emplace_back(CVector(u.col(k)));
    for (int k = 0; k < dim; ++k) rays.emplace_back(CVector(v.col(k)));
    const ValueConstraintSystem vcs = compile(make_ray_set(dim, rays));
    for (int var = 0; var < 6; ++var) {
      for (int val = 0; val < 2; ++val) {
        SearchOptions bt, ex;
        bt.method = SearchMethod::kBacktracking;
        ex.method = SearchMethod::kExhaustive;
        bt.pinned = ex.pinned = {{var, val}};
        const SearchResult rb = find_value_map(vcs, bt);
        const SearchResult re = find_value_map(vcs, ex);
        REQUIRE(rb.verdict == re.verdict);
        if (rb.verdict == SearchVerdict::kAssignment) {
          CHECK(rb.assignment->values == re.assignment->values);
          CHECK(rb.assignment->values[var] == val);
        }
      }
    }
  }
}

TEST_CASE("permuting ray order never changes the existence verdict") {
  const RayCatalog cat = load_ray_catalog(data_path("ks18_dim4.json"));
  auto rng = make_rng(33);
  std::vector<Ray> rays = cat.rays;
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(rays.begin(), rays.end(), rng);
    CHECK(find_value_map(compile(make_ray_set(4, rays))).verdict ==
          SearchVerdict::kNone);
  }
  std::vector<Ray> basis = standard_basis_rays(4);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(basis.begin(), basis.end(), rng);
    CHECK(find_value_map(compile(make_ray_set(4, basis))).verdict ==
          SearchVerdict::kAssignment);
  }
}

TEST_CASE("any returned assignment passes verify_value_map") {
  auto rng = make_rng(34);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 3;
    std::vector<Ray> rays;
    const CMatrix u = random_unitary(rng, dim);
    for (int k = 0; k < dim; ++k) rays.emplace_back(CVector(u.col(k)));
    for (int k = 0; k < 4; ++k) rays.emplace_back(random_unit_vector(rng, dim));
    const RaySet rs = make_ray_set(dim, rays);
    const SearchResult r = find_value_map(compile(rs));
    if (r.verdict == SearchVerdict::kAssignment) {
      CHECK(verify_value_map(rs, *r.assignment).ok);
    }
  }
}

TEST_CASE("verify_value_map pinpoints the violated clause") {
  const RaySet rs = make_ray_set(3, standard_basis_rays(3));
  SUBCASE("accepts (1,0,0)") {
    CHECK(verify_value_map(rs, {{1, 0, 0}}).ok);
  }
  SUBCASE("rejects the forbidden (1,1) pair") {
    const VerifyResult v = verify_value_map(rs, {{1, 1, 0}});
    REQUIRE_FALSE(v.ok);
    REQUIRE(v.violation.has_value());
    CHECK(v.violation->family == "pair");
    CHECK(v.violation->indices == std::vector<int>{0, 1});
  }
  SUBCASE("rejects all-zeros on a complete basis") {
    const VerifyResult v = verify_value_map(rs, {{0, 0, 0}});
    REQUIRE_FALSE(v.ok);
    REQUIRE(v.violation.has_value());
    CHECK(v.violation->family == "exactly-one");
  }
  SUBCASE("incomplete assignment is an error") {
    CHECK_THROWS_AS(verify_value_map(rs, {{1, 0}}), PreconditionError);
  }
}

TEST_CASE("rays confined to a hyperplane accept the all-zeros map") {
  auto rng = make_rng(35);
  for (int dim = 3; dim <= 5; ++dim) {
    std::vector<Ray> rays;
    for (int k = 0; k < 2 * dim; ++k) {
      CVector v = CVector::Zero(dim);
      v.head(dim - 1) = random_unit_vector(rng, dim - 1);
      rays.emplace_back(std::move(v));
    }
    const RaySet rs = make_ray_set(dim, rays);
    CHECK(compile(rs).exactly_one_clauses.empty());
    ValueAssignment zeros;
    zeros.values.assign(rays.size(), 0);
    CHECK(verify_value_map(rs, zeros).ok);
  }
}

TEST_CASE("lift_dimension") {
  const RayCatalog cat = load_ray_catalog(data_path("peres33_dim3.json"));
  const RaySet base = cat.to_ray_set();

  SUBCASE("one step: certified NONE and within the size bound") {
    const RaySet lifted = lift_dimension(base, 4);
    CHECK(lifted.dim == 4);
    CHECK(lifted.rays.size() <= 2 * (base.rays.size() + 1));
    CHECK(find_value_map(compile(lifted)).verdict == SearchVerdict::kNone);
  }
  SUBCASE("lifting a colorable set is rejected") {
    const RaySet basis = make_ray_set(3, standard_basis_rays(3));
    CHECK_THROWS_AS(lift_dimension(basis, 4), PreconditionError);
  }
  SUBCASE("target dimension must exceed the input") {
    CHECK_THROWS_AS(lift_dimension(base, 3), PreconditionError);
  }
  SUBCASE("O1 alone forces psi to 1") {
    // Rebuild O1 by hand: the base set padded into the hyperplane orthogonal
    // to psi = e_4, plus |psi><psi| itself.
    std::vector<Ray> o1;
    for (const auto& r : base.rays) {
      CVector v = CVector::Zero(4);
      v.head(3) = r.vector();
      o1.emplace_back(std::move(v));
    }
    CVector psi = CVector::Zero(4);
    psi[3] = 1.0;
    o1.emplace_back(std::move(psi));
    const int psi_index = static_cast<int>(o1.size()) - 1;
    const ValueConstraintSystem vcs = compile(make_ray_set(4, o1));

    SearchOptions pin0, pin1;
    pin0.pinned = {{psi_index, 0}};
    pin1.pinned = {{psi_index, 1}};
    CHECK(find_value_map(vcs, pin0).verdict == SearchVerdict::kNone);
    CHECK(find_value_map(vcs, pin1).verdict == SearchVerdict::kAssignment);
  }
}

TEST_CASE("tensor_lift") {
  const RayCatalog cat = load_ray_catalog(data_path("basis3_dim3.json"));
  const RaySet rs = cat.to_ray_set();

  SUBCASE("clause structure is isomorphic to the input's") {
    const ProjectionSet lifted = tensor_lift(rs, 2);
    CHECK(lifted.dim == 6);
    for (const auto& P : lifted.projections) {
      CHECK(P.trace() == doctest::Approx(2.0));
    }
    const ValueConstraintSystem a = compile(rs);
    const ValueConstraintSystem b = compile(lifted);
    CHECK(a.num_vars == b.num_vars);
    CHECK(a.pair_clauses == b.pair_clauses);
    CHECK(a.exactly_one_clauses == b.exactly_one_clauses);
    CHECK(a.at_most_one_clauses == b.at_most_one_clauses);
  }
  SUBCASE("k = 1 reproduces the input structure") {
    const ProjectionSet same = tensor_lift(rs, 1);
    CHECK(same.dim == rs.dim);
    const ValueConstraintSystem a = compile(rs);
    const ValueConstraintSystem b = compile(same);
    CHECK(a.pair_clauses == b.pair_clauses);
    CHECK(a.exactly_one_clauses == b.exactly_one_clauses);
  }
  SUBCASE("an uncolorable input stays uncolorable") {
    const RayCatalog ks = load_ray_catalog(data_path("ks18_dim4.json"));
    const ProjectionSet lifted = tensor_lift(ks.to_ray_set(), 2);
    CHECK(find_value_map(compile(lifted)).verdict == SearchVerdict::kNone);
  }
}
