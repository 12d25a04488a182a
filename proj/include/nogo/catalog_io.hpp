#pragma once

#include <string>
#include <vector>

#include "nogo/convex_linear.hpp"
#include "nogo/operator_core.hpp"
#include "nogo/spekkens_nogo.hpp"
#include "nogo/value_maps.hpp"

namespace nogo {

/// On-disk ray catalog:
///   { "dim": d, "tol": t, "rays": [[[re,im], ...], ...],
///     "name": str, "expect": "colorable"|"uncolorable"|"unknown" }
/// Entries may be [re, im] pairs or plain numbers (imaginary part 0).
/// Vectors are normalized on load.
struct RayCatalog {
  Eigen::Index dim = 0;
  double tol = 1e-10;
  std::string name;
  std::string expect = "unknown";  // cross-checked by the CLI
  std::vector<Ray> rays;

  RaySet to_ray_set() const { return make_ray_set(dim, rays, tol); }
};

RayCatalog load_ray_catalog(const std::string& path);
RayCatalog parse_ray_catalog(const std::string& json_text);
std::string serialize_ray_catalog(const RayCatalog& catalog);
void save_ray_catalog(const std::string& path, const RayCatalog& catalog);

/// Candidate file: { "weights": [...], "A": [[x,y,z], ...],
///                   "B": [[x,y,z], ...], "C": [...] }
FiniteRepresentationCandidate load_candidate(const std::string& path);
FiniteRepresentationCandidate parse_candidate(const std::string& json_text);

/// Operator list: { "operators": [ [[entry, ...], ...], ... ] } with entries
/// as [re, im] pairs or plain numbers.
std::vector<HermitianOperator> load_operator_list(const std::string& path,
                                                  double tol = -1.0);
std::vector<HermitianOperator> parse_operator_list(
    const std::string& json_text, double tol = -1.0);

/// Point sample: { "points": [[...], ...], "values": [[...], ...] };
/// scalar values are read as 1-vectors.
PointSample load_point_sample(const std::string& path);
PointSample parse_point_sample(const std::string& json_text);

}  // namespace nogo
