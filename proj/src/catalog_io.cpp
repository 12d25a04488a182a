#include "nogo/catalog_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nogo {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    std::ostringstream os;
    os << what << ": malformed JSON";
    throw ParseError(os.str());
  }
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Complex parse_entry(const json& e, const char* what) {
  if (e.is_number()) return Complex(e.get<double>(), 0.0);
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
    return Complex(e[0].get<double>(), e[1].get<double>());
  }
  throw ParseError(std::string(what) +
                   ": entries must be numbers or [re, im] pairs");
}

Eigen::VectorXd parse_real_vector(const json& a, const char* what) {
  if (!a.is_array()) throw ParseError(std::string(what) + ": expected array");
  Eigen::VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) {
      throw ParseError(std::string(what) + ": expected numeric array");
    }
    v[i] = a[i].get<double>();
  }
  return v;
}

}  // namespace

RayCatalog parse_ray_catalog(const std::string& json_text) {
  const json j = parse_json(json_text, "ray catalog");
  RayCatalog cat;
  if (!j.is_object() || !j.contains("dim") || !j.contains("rays")) {
    throw ParseError("ray catalog: need at least the fields dim and rays");
  }
  if (!j["dim"].is_number_integer() || j["dim"].get<int>() < 1) {
    throw ParseError("ray catalog: dim must be a positive integer");
  }
  cat.dim = j["dim"].get<int>();
  cat.tol = j.value("tol", 1e-10);
  cat.name = j.value("name", "");
  cat.expect = j.value("expect", "unknown");
  if (cat.expect != "colorable" && cat.expect != "uncolorable" &&
      cat.expect != "unknown") {
    throw ParseError("ray catalog: expect must be colorable|uncolorable|unknown");
  }
  if (!j["rays"].is_array() || j["rays"].empty()) {
    throw ParseError("ray catalog: rays must be a nonempty array");
  }
  for (const auto& rj : j["rays"]) {
    if (!rj.is_array() || static_cast<Eigen::Index>(rj.size()) != cat.dim) {
      std::ostringstream os;
      os << "ray catalog: each ray must have exactly " << cat.dim
         << " entries";
      throw ParseError(os.str());
    }
    CVector v(cat.dim);
    for (Eigen::Index k = 0; k < cat.dim; ++k) {
      v[k] = parse_entry(rj[k], "ray catalog");
    }
    cat.rays.emplace_back(std::move(v));
  }
  return cat;
}

RayCatalog load_ray_catalog(const std::string& path) {
  return parse_ray_catalog(read_file(path));
}

std::string serialize_ray_catalog(const RayCatalog& catalog) {
  nlohmann::ordered_json j;
  j["dim"] = catalog.dim;
  j["tol"] = catalog.tol;
  j["name"] = catalog.name;
  j["expect"] = catalog.expect;
  j["rays"] = nlohmann::ordered_json::array();
  for (const auto& r : catalog.rays) {
    nlohmann::ordered_json rj = nlohmann::ordered_json::array();
    for (Eigen::Index k = 0; k < r.dim(); ++k) {
      rj.push_back({r.vector()[k].real(), r.vector()[k].imag()});
    }
    j["rays"].push_back(std::move(rj));
  }
  return j.dump(2);
}

void save_ray_catalog(const std::string& path, const RayCatalog& catalog) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write file: " + path);
  out << serialize_ray_catalog(catalog) << "\n";
}

FiniteRepresentationCandidate parse_candidate(const std::string& json_text) {
  const json j = parse_json(json_text, "candidate");
  for (const char* key : {"weights", "A", "B", "C"}) {
    if (!j.is_object() || !j.contains(key)) {
      throw ParseError(std::string("candidate: missing field ") + key);
    }
  }
  FiniteRepresentationCandidate cand;
  const Eigen::VectorXd w = parse_real_vector(j["weights"], "candidate weights");
  const Eigen::VectorXd c = parse_real_vector(j["C"], "candidate C");
  const Eigen::Index n = w.size();
  auto parse_rows3 = [&](const json& a, const char* what) {
    if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != n) {
      throw ParseError(std::string(what) + ": row count must match weights");
    }
    Eigen::Matrix<double, Eigen::Dynamic, 3> m(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::VectorXd row = parse_real_vector(a[i], what);
      if (row.size() != 3) {
        throw ParseError(std::string(what) + ": rows must have 3 entries");
      }
      m.row(i) = row.transpose();
    }
    return m;
  };
  cand.weights = w;
  cand.C = c;
  cand.A = parse_rows3(j["A"], "candidate A");
  cand.B = parse_rows3(j["B"], "candidate B");
  require_well_formed(cand);
  return cand;
}

FiniteRepresentationCandidate load_candidate(const std::string& path) {
  return parse_candidate(read_file(path));
}

std::vector<HermitianOperator> parse_operator_list(const std::string& json_text,
                                                   double tol) {
  const json j = parse_json(json_text, "operator list");
  if (!j.is_object() || !j.contains("operators") ||
      !j["operators"].is_array()) {
    throw ParseError("operator list: missing operators array");
  }
  if (j["operators"].empty()) {
    throw ParseError("operator list: operators array is empty");
  }
  std::vector<HermitianOperator> ops;
  for (const auto& mj : j["operators"]) {
    if (!mj.is_array() || mj.empty()) {
      throw ParseError("operator list: each operator must be a matrix");
    }
    const Eigen::Index d = static_cast<Eigen::Index>(mj.size());
    CMatrix m(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
      if (!mj[r].is_array() || static_cast<Eigen::Index>(mj[r].size()) != d) {
        throw ParseError("operator list: matrices must be square");
      }
      for (Eigen::Index c = 0; c < d; ++c) {
        m(r, c) = parse_entry(mj[r][c], "operator list");
      }
    }
    try {
      ops.emplace_back(std::move(m), tol);
    } catch (const PreconditionError& e) {
      throw ParseError(std::string("operator list: ") + e.what());
    }
  }
  return ops;
}

std::vector<HermitianOperator> load_operator_list(const std::string& path,
                                                  double tol) {
  return parse_operator_list(read_file(path), tol);
}

PointSample parse_point_sample(const std::string& json_text) {
  const json j = parse_json(json_text, "point sample");
  if (!j.is_object() || !j.contains("points") || !j.contains("values")) {
    throw ParseError("point sample: need fields points and values");
  }
  const json& pj = j["points"];
  const json& vj = j["values"];
  if (!pj.is_array() || !vj.is_array() || pj.empty() ||
      pj.size() != vj.size()) {
    throw ParseError("point sample: points and values must pair up");
  }
  auto parse_matrix = [](const json& a, const char* what) {
    const Eigen::Index n = static_cast<Eigen::Index>(a.size());
    Eigen::Index cols = -1;
    Eigen::MatrixXd m;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::VectorXd row;
      if (a[i].is_number()) {
        row.resize(1);
        row[0] = a[i].get<double>();
      } else {
        row = parse_real_vector(a[i], what);
      }
      if (cols < 0) {
        cols = row.size();
        m.resize(n, cols);
      } else if (row.size() != cols) {
        throw ParseError(std::string(what) + ": inconsistent row lengths");
      }
      m.row(i) = row.transpose();
    }
    return m;
  };
  PointSample ps;
  ps.points = parse_matrix(pj, "point sample points");
  ps.values = parse_matrix(vj, "point sample values");
  return ps;
}

PointSample load_point_sample(const std::string& path) {
  return parse_point_sample(read_file(path));
}

}  // namespace nogo
