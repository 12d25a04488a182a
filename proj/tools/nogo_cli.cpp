#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "nogo/bell_model.hpp"
#include "nogo/catalog_io.hpp"
#include "nogo/convex_linear.hpp"
#include "nogo/expectation_nogo.hpp"
#include "nogo/operator_core.hpp"
#include "nogo/reduction.hpp"
#include "nogo/spekkens_nogo.hpp"
#include "nogo/value_maps.hpp"

namespace {

using nlohmann::ordered_json;

constexpr const char* kToolVersion = "0.1.0";

// Exit codes: 0 success, 1 input error, 2 mathematical precondition
// violation, 3 expectation mismatch, 4 budget exceeded.
constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitPrecondition = 2;
constexpr int kExitExpectMismatch = 3;
constexpr int kExitBudget = 4;

struct ExpectMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BudgetStop : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string read_file_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw nogo::ParseError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Eigen::Vector3d parse_vec3(const std::string& text, const char* what) {
  Eigen::Vector3d v;
  char c1 = 0, c2 = 0;
  std::istringstream is(text);
  if (!(is >> v[0] >> c1 >> v[1] >> c2 >> v[2]) || c1 != ',' || c2 != ',') {
    throw nogo::ParseError(std::string(what) + ": expected X,Y,Z");
  }
  std::string rest;
  if (is >> rest) throw nogo::ParseError(std::string(what) + ": trailing input");
  return v;
}

nogo::Observable2D parse_observable(const std::string& text) {
  if (text == "sx") return {0.0, {1, 0, 0}};
  if (text == "sy") return {0.0, {0, 1, 0}};
  if (text == "sz") return {0.0, {0, 0, 1}};
  if (text == "id") return {1.0, {0, 0, 0}};
  // numeric form a0,ax,ay,az
  std::istringstream is(text);
  double a0 = 0;
  Eigen::Vector3d a;
  char c1 = 0, c2 = 0, c3 = 0;
  if (!(is >> a0 >> c1 >> a[0] >> c2 >> a[1] >> c3 >> a[2]) || c1 != ',' ||
      c2 != ',' || c3 != ',') {
    throw nogo::ParseError(
        "observable: expected sx|sy|sz|id or a0,ax,ay,az");
  }
  return {a0, a};
}

ordered_json json_matrix(const Eigen::Matrix3d& m) {
  ordered_json rows = ordered_json::array();
  for (int r = 0; r < 3; ++r) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < 3; ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json json_complex_matrix(const nogo::CMatrix& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back({m(r, c).real(), m(r, c).imag()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void print_json_as_text(const ordered_json& j, const std::string& prefix,
                        std::ostream& out) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      print_json_as_text(value, prefix.empty() ? key : prefix + "." + key, out);
    }
  } else if (j.is_array() && !j.empty() &&
             (j[0].is_object() || j[0].is_array())) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      print_json_as_text(j[i], prefix + "[" + std::to_string(i) + "]", out);
    }
  } else {
    out << prefix << ": " << j.dump() << "\n";
  }
}

struct GlobalOptions {
  double tol = 1e-10;
  std::uint64_t seed = 0;
  bool seed_explicit = false;
  std::uint64_t budget = 100'000'000;
  std::string format = "json";
};

void emit_report(const GlobalOptions& global, const std::string& command,
                 ordered_json inputs, ordered_json verdict) {
  ordered_json report;
  report["command"] = command;
  report["inputs"] = std::move(inputs);
  report["verdict"] = std::move(verdict);
  report["seed"] = global.seed;
  report["tool_version"] = kToolVersion;
  if (global.format == "text") {
    print_json_as_text(report, "", std::cout);
  } else {
    std::cout << report.dump(2) << "\n";
  }
}

// --- subcommand bodies ------------------------------------------------------

void run_joint_spectrum(const GlobalOptions& global, const std::string& file) {
  const std::string bytes = read_file_or_throw(file);
  const auto ops = nogo::parse_operator_list(bytes, global.tol);
  const nogo::JointSpectrum js = nogo::joint_spectrum(ops, global.tol);
  ordered_json points = ordered_json::array();
  for (const auto& p : js.points) {
    ordered_json tuple = ordered_json::array();
    for (Eigen::Index k = 0; k < p.size(); ++k) tuple.push_back(p[k]);
    points.push_back(std::move(tuple));
  }
  emit_report(global, "joint-spectrum",
              {{"file", file}, {"digest", fnv1a_hex(bytes)}},
              {{"arity", js.arity}, {"points", std::move(points)}});
}

void check_expectation(const nogo::RayCatalog& cat,
                       nogo::SearchVerdict verdict) {
  if (verdict == nogo::SearchVerdict::kBudgetExceeded) {
    throw BudgetStop("search exceeded the node budget");
  }
  if (cat.expect == "unknown") return;
  const bool colorable = verdict == nogo::SearchVerdict::kAssignment;
  if (colorable != (cat.expect == "colorable")) {
    throw ExpectMismatch("catalog expects " + cat.expect +
                         " but the search found the opposite");
  }
}

ordered_json search_verdict_json(const nogo::SearchResult& result) {
  ordered_json v;
  switch (result.verdict) {
    case nogo::SearchVerdict::kAssignment: {
      v["value_map"] = "exists";
      ordered_json vals = ordered_json::array();
      for (auto b : result.assignment->values) vals.push_back(int(b));
      v["assignment"] = std::move(vals);
      break;
    }
    case nogo::SearchVerdict::kNone:
      v["value_map"] = "none";
      break;
    case nogo::SearchVerdict::kBudgetExceeded:
      v["value_map"] = "budget-exceeded";
      break;
  }
  v["nodes"] = result.nodes;
  return v;
}

void run_ks_check(const GlobalOptions& global, const std::string& file,
                  const std::string& method) {
  const std::string bytes = read_file_or_throw(file);
  const nogo::RayCatalog cat = nogo::parse_ray_catalog(bytes);
  const nogo::RaySet rs = cat.to_ray_set();
  const nogo::ValueConstraintSystem vcs = nogo::compile(rs);

  nogo::SearchOptions opt;
  opt.method = method == "exhaustive" ? nogo::SearchMethod::kExhaustive
                                      : nogo::SearchMethod::kBacktracking;
  opt.node_budget = global.budget;
  const nogo::SearchResult result = nogo::find_value_map(vcs, opt);

  ordered_json verdict = search_verdict_json(result);
  verdict["rays"] = rs.rays.size();
  verdict["complete_bases"] = vcs.exactly_one_clauses.size();
  verdict["expect"] = cat.expect;
  emit_report(global, "ks-check",
              {{"file", file},
               {"digest", fnv1a_hex(bytes)},
               {"method", method},
               {"budget", global.budget}},
              verdict);
  check_expectation(cat, result.verdict);
}

void run_ks_lift(const GlobalOptions& global, const std::string& file,
                 int target_dim, const std::string& out_path) {
  const std::string bytes = read_file_or_throw(file);
  const nogo::RayCatalog cat = nogo::parse_ray_catalog(bytes);
  nogo::RaySet lifted;
  try {
    lifted = nogo::lift_dimension(cat.to_ray_set(), target_dim, global.budget);
  } catch (const nogo::BudgetExceededError& e) {
    throw BudgetStop(e.what());
  }

  nogo::RayCatalog out;
  out.dim = lifted.dim;
  out.tol = cat.tol;
  out.name = cat.name + " lifted to dim " + std::to_string(target_dim);
  out.expect = "uncolorable";
  out.rays = lifted.rays;
  if (!out_path.empty()) nogo::save_ray_catalog(out_path, out);

  ordered_json verdict;
  verdict["dim"] = lifted.dim;
  verdict["rays"] = lifted.rays.size();
  verdict["value_map"] = "none";
  verdict["catalog"] = ordered_json::parse(nogo::serialize_ray_catalog(out));
  emit_report(global, "ks-lift",
              {{"file", file},
               {"digest", fnv1a_hex(bytes)},
               {"target_dim", target_dim}},
              verdict);
}

void run_bell(const GlobalOptions& global, const std::string& n_text,
              const std::string& obs_text, std::uint64_t samples) {
  const Eigen::Vector3d n = parse_vec3(n_text, "--n");
  if (std::abs(n.norm() - 1.0) > 1e-9) {
    throw nogo::ParseError("--n must be a unit vector");
  }
  const nogo::Observable2D obs = parse_observable(obs_text);
  const double exact = nogo::expectation_exact(n, obs);
  const nogo::MonteCarloEstimate mc =
      nogo::expectation_monte_carlo(n, obs, samples, global.seed);
  ordered_json verdict;
  verdict["exact"] = exact;
  verdict["monte_carlo"] = {{"mean", mc.mean},
                            {"std_error", mc.std_error},
                            {"plus_frequency", mc.plus_frequency},
                            {"samples", samples}};
  verdict["plus_frequency_exact"] =
      obs.a.norm() > 0 ? 0.5 * (1.0 + obs.a.normalized().dot(n)) : 1.0;
  emit_report(global, "bell",
              {{"n", n_text},
               {"obs", obs_text},
               {"samples", samples},
               {"digest", fnv1a_hex(n_text + "|" + obs_text)}},
              verdict);
}

std::vector<std::pair<double, Eigen::Vector3d>> parse_mixture(
    const std::string& text) {
  std::vector<std::pair<double, Eigen::Vector3d>> mix;
  std::istringstream is(text);
  std::string part;
  while (std::getline(is, part, ';')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) {
      throw nogo::ParseError("--mixture: expected W:X,Y,Z;W:X,Y,Z;...");
    }
    double w = 0.0;
    try {
      w = std::stod(part.substr(0, colon));
    } catch (const std::exception&) {
      throw nogo::ParseError("--mixture: bad weight");
    }
    mix.emplace_back(w, parse_vec3(part.substr(colon + 1), "--mixture"));
  }
  if (mix.empty()) throw nogo::ParseError("--mixture: empty");
  return mix;
}

void run_bell_moments(const GlobalOptions& global, const std::string& mixture,
                      std::uint64_t samples) {
  const auto mix = parse_mixture(mixture);
  const Eigen::Matrix3d closed = nogo::second_moment_matrix(mix);
  const Eigen::Matrix3d mc =
      nogo::second_moment_matrix_monte_carlo(mix, samples, global.seed);
  ordered_json verdict;
  verdict["closed_form"] = json_matrix(closed);
  verdict["monte_carlo"] = json_matrix(mc);
  verdict["max_abs_difference"] = (closed - mc).cwiseAbs().maxCoeff();
  verdict["samples"] = samples;
  emit_report(global, "bell-moments",
              {{"mixture", mixture}, {"digest", fnv1a_hex(mixture)}},
              verdict);
}

void run_coexist(const GlobalOptions& global, const std::string& pair,
                 const std::string& a_text, const std::string& b_text) {
  nogo::HermitianOperator A = nogo::ket0_projector();
  nogo::HermitianOperator B = nogo::ketplus_projector();
  if (pair == "custom") {
    const Eigen::Vector3d a = parse_vec3(a_text, "--a");
    const Eigen::Vector3d b = parse_vec3(b_text, "--b");
    if (std::abs(a.norm() - 1.0) > 1e-9 || std::abs(b.norm() - 1.0) > 1e-9) {
      throw nogo::ParseError("--a and --b must be unit Bloch vectors");
    }
    A = nogo::pauli_to_operator({0.5, a}, nogo::PauliKind::kState);
    B = nogo::pauli_to_operator({0.5, b}, nogo::PauliKind::kState);
  }
  const nogo::FeasibilityMargin margin = nogo::coexistence_margin(A, B);
  const nogo::CoexistenceQuadruple at_zero = nogo::quadruple(
      A, B, nogo::HermitianOperator(nogo::CMatrix::Zero(2, 2)));

  ordered_json verdict;
  verdict["margin"] = margin.value;
  verdict["argmax_H"] = json_complex_matrix(margin.argmax_H.matrix());
  verdict["witness_fourth_member_least_eigenvalue_at_H0"] =
      at_zero.least_eigenvalues[3];
  ordered_json quad = ordered_json::array();
  for (int k = 0; k < 4; ++k) quad.push_back(at_zero.least_eigenvalues[k]);
  verdict["least_eigenvalues_at_H0"] = std::move(quad);
  emit_report(global, "coexist",
              {{"pair", pair},
               {"a", a_text},
               {"b", b_text},
               {"digest", fnv1a_hex(pair + "|" + a_text + "|" + b_text)}},
              verdict);
}

// Re-evaluate a refutation report against the candidate before emitting it.
bool reverify_report(const nogo::FiniteRepresentationCandidate& cand,
                     const nogo::RefutationReport& r, double tol = 1e-8) {
  if (r.violated == "N1") {
    return cand.B.row(r.lambda).norm() - 1.0 >= r.magnitude - tol;
  }
  if (r.violated == "N2") {
    return cand.A.row(r.lambda).norm() - cand.C[r.lambda] >= r.magnitude - tol;
  }
  if (r.violated == "E2") {
    const double sum = (cand.weights.array() * cand.B.col(r.i - 1).array() *
                        cand.A.col(r.j - 1).array())
                           .sum();
    return std::abs(sum - ((r.i == r.j) ? 1.0 : 0.0)) >= r.magnitude - tol;
  }
  if (r.violated == "E3") {
    const double sum = (cand.weights.array() * cand.B.col(r.i - 1).array() *
                        cand.C.array())
                           .sum();
    return std::abs(sum) >= r.magnitude - tol;
  }
  if (r.violated == "E4") {
    const double sum =
        (cand.weights.array() * cand.A.col(r.i - 1).array()).sum();
    return std::abs(sum) >= r.magnitude - tol;
  }
  const double sum = (cand.weights.array() * cand.C.array()).sum();
  return std::abs(sum - 1.0) >= r.magnitude - tol;
}

ordered_json report_json(const nogo::RefutationReport& r) {
  ordered_json j;
  j["violated"] = r.violated;
  if (r.lambda >= 0) j["lambda"] = r.lambda;
  if (r.i >= 0) j["i"] = r.i;
  if (r.j >= 0) j["j"] = r.j;
  j["magnitude"] = r.magnitude;
  return j;
}

void run_spekkens_refute(const GlobalOptions& global, const std::string& file) {
  const std::string bytes = read_file_or_throw(file);
  const nogo::FiniteRepresentationCandidate cand = nogo::parse_candidate(bytes);
  const auto first = nogo::verify_candidate(cand);
  ordered_json verdict;
  if (!first) {
    // Unreachable mathematically; emitting it would be a library defect.
    verdict["status"] = "PASS";
  } else {
    verdict["status"] = "refuted";
    if (!reverify_report(cand, *first)) {
      throw nogo::Error("internal error: refutation failed re-verification");
    }
    verdict["first_violation"] = report_json(*first);
    const nogo::RefutationReport chain = nogo::refute_by_chain(cand);
    if (reverify_report(cand, chain)) {
      verdict["chain_replay"] = report_json(chain);
    }
  }
  emit_report(global, "spekkens-refute",
              {{"file", file}, {"digest", fnv1a_hex(bytes)}},
              verdict);
}

void run_extend(const GlobalOptions& global, const std::string& file) {
  const std::string bytes = read_file_or_throw(file);
  const nogo::PointSample ps = nogo::parse_point_sample(bytes);
  const auto result = nogo::extend_translated_linear(ps);
  ordered_json verdict;
  if (std::holds_alternative<nogo::TranslatedLinearMap>(result)) {
    const auto& map = std::get<nogo::TranslatedLinearMap>(result);
    verdict["status"] = "translated-linear";
    ordered_json u0 = ordered_json::array(), w0 = ordered_json::array();
    for (Eigen::Index k = 0; k < map.u0.size(); ++k) u0.push_back(map.u0[k]);
    for (Eigen::Index k = 0; k < map.w0.size(); ++k) w0.push_back(map.w0[k]);
    verdict["u0"] = std::move(u0);
    verdict["w0"] = std::move(w0);
    verdict["hull_dimension"] = map.hull_basis.cols();
    verdict["linear_part_norm"] = map.h.norm();
    ordered_json h = ordered_json::array();
    for (Eigen::Index r = 0; r < map.h.rows(); ++r) {
      ordered_json row = ordered_json::array();
      for (Eigen::Index c = 0; c < map.h.cols(); ++c) row.push_back(map.h(r, c));
      h.push_back(std::move(row));
    }
    verdict["h_on_hull_basis"] = std::move(h);
    verdict["extension_off_hull"] = "zero-completion (non-canonical)";
  } else {
    const auto& w = std::get<nogo::AffineWitness>(result);
    verdict["status"] = "not-convex-linear";
    auto combo_json = [](const nogo::AffineCombination& combo) {
      ordered_json arr = ordered_json::array();
      for (const auto& [idx, coeff] : combo) {
        arr.push_back({{"index", idx}, {"coeff", coeff}});
      }
      return arr;
    };
    verdict["witness"] = {{"combo_a", combo_json(w.combo_a)},
                          {"combo_b", combo_json(w.combo_b)}};
  }
  emit_report(global, "extend",
              {{"file", file}, {"digest", fnv1a_hex(bytes)}},
              verdict);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hidden-variable no-go theorem verification toolkit"};
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--tol", global.tol, "global tolerance default");
  auto* seed_opt = app.add_option("--seed", global.seed, "RNG seed");
  app.add_option("--budget", global.budget, "search node budget");
  app.add_option("--format", global.format, "output format")
      ->check(CLI::IsMember({"json", "text"}));

  std::string file, method = "backtracking", n_text, obs_text;
  std::string mixture, pair = "default", a_text = "0,0,1", b_text = "1,0,0";
  std::string out_path;
  int target_dim = 0;
  std::uint64_t samples = 1'000'000;

  auto* cmd_js = app.add_subcommand("joint-spectrum",
                                    "joint spectrum of a commuting family");
  cmd_js->fallthrough();
  cmd_js->add_option("file", file, "operator list JSON")->required();

  auto* cmd_check = app.add_subcommand("ks-check", "search a ray catalog");
  cmd_check->fallthrough();
  cmd_check->add_option("file", file, "ray catalog JSON")->required();
  cmd_check->add_option("--method", method, "search method")
      ->check(CLI::IsMember({"backtracking", "exhaustive"}));

  auto* cmd_lift = app.add_subcommand("ks-lift", "lift a catalog's dimension");
  cmd_lift->fallthrough();
  cmd_lift->add_option("file", file, "ray catalog JSON")->required();
  cmd_lift->add_option("--target-dim", target_dim, "target dimension")
      ->required();
  cmd_lift->add_option("--out", out_path, "write the lifted catalog here");

  auto* cmd_bell = app.add_subcommand("bell", "Bell model expectations");
  cmd_bell->fallthrough();
  cmd_bell->add_option("--n", n_text, "state direction X,Y,Z")->required();
  cmd_bell->add_option("--obs", obs_text, "observable sx|sy|sz|id or a0,ax,ay,az")
      ->required();
  cmd_bell->add_option("--samples", samples, "Monte Carlo samples");

  auto* cmd_moments =
      app.add_subcommand("bell-moments", "second moments of a state mixture");
  cmd_moments->fallthrough();
  cmd_moments->add_option("--mixture", mixture, "W:X,Y,Z;W:X,Y,Z;...")
      ->required();
  cmd_moments->add_option("--samples", samples, "Monte Carlo samples");

  auto* cmd_coexist =
      app.add_subcommand("coexist", "coexistence margin of two projections");
  cmd_coexist->fallthrough();
  cmd_coexist->add_option("--pair", pair, "default|custom")
      ->check(CLI::IsMember({"default", "custom"}));
  cmd_coexist->add_option("--a", a_text, "Bloch vector of the first projection");
  cmd_coexist->add_option("--b", b_text, "Bloch vector of the second projection");

  auto* cmd_refute =
      app.add_subcommand("spekkens-refute", "refute a finite candidate");
  cmd_refute->fallthrough();
  cmd_refute->add_option("file", file, "candidate JSON")->required();

  auto* cmd_extend =
      app.add_subcommand("extend", "translated-linear extension of a sample");
  cmd_extend->fallthrough();
  cmd_extend->add_option("file", file, "point sample JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInput;
  }

  if (seed_opt->count() == 0) {
    if (const char* env = std::getenv("NOGO_SEED")) {
      try {
        global.seed = std::stoull(env);
      } catch (const std::exception&) {
        std::cerr << "NOGO_SEED must be an integer\n";
        return kExitInput;
      }
    }
  }
  nogo::set_default_tolerance(global.tol);

  try {
    if (cmd_js->parsed()) {
      run_joint_spectrum(global, file);
    } else if (cmd_check->parsed()) {
      run_ks_check(global, file, method);
    } else if (cmd_lift->parsed()) {
      run_ks_lift(global, file, target_dim, out_path);
    } else if (cmd_bell->parsed()) {
      run_bell(global, n_text, obs_text, samples);
    } else if (cmd_moments->parsed()) {
      run_bell_moments(global, mixture, samples);
    } else if (cmd_coexist->parsed()) {
      run_coexist(global, pair, a_text, b_text);
    } else if (cmd_refute->parsed()) {
      run_spekkens_refute(global, file);
    } else if (cmd_extend->parsed()) {
      run_extend(global, file);
    }
  } catch (const nogo::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const BudgetStop& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const ExpectMismatch& e) {
    std::cerr << "expectation mismatch: " << e.what() << "\n";
    return kExitExpectMismatch;
  } catch (const nogo::NonCommutingError& e) {
    std::cerr << "precondition violation: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const nogo::BudgetExceededError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const nogo::PreconditionError& e) {
    std::cerr << "precondition violation: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const nogo::DimensionMismatchError& e) {
    std::cerr << "precondition violation: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
