#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace {

using nlohmann::json;

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd =
      env + (env.empty() ? "" : " ") + NOGO_CLI_PATH + " " + args + " 2>/dev/null";
  std::array<char, 4096> buffer;
  RunResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::size_t got = 0;
  while ((got = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
    result.out.append(buffer.data(), got);
  }
  const int status = pclose(pipe);
  result.exit_code = WEXITSTATUS(status);
  return result;
}

std::string data_path(const char* name) {
  return std::string(NOGO_DATA_DIR) + "/" + name;
}

std::string write_temp(const char* name, const std::string& content) {
  const std::string path = std::string("/tmp/") + name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("joint-spectrum fixtures") {
  SUBCASE("three orthogonal projections") {
    const RunResult r =
        run_cli("joint-spectrum " + data_path("ops_rank1_triple_dim3.json"));
    REQUIRE(r.exit_code == 0);
    const json report = json::parse(r.out);
    CHECK(report["verdict"]["points"] ==
          json::parse("[[0,0,1],[0,1,0],[1,0,0]]"));
  }
  SUBCASE("orthogonal pair admits all-zeros") {
    const RunResult r =
        run_cli("joint-spectrum " + data_path("ops_rank1_pair_dim3.json"));
    REQUIRE(r.exit_code == 0);
    CHECK(json::parse(r.out)["verdict"]["points"] ==
          json::parse("[[0,0],[0,1],[1,0]]"));
  }
  SUBCASE("diagonal pair") {
    const RunResult r =
        run_cli("joint-spectrum " + data_path("ops_diag_pair_dim3.json"));
    REQUIRE(r.exit_code == 0);
    CHECK(json::parse(r.out)["verdict"]["points"] ==
          json::parse("[[1,3],[2,3],[2,4]]"));
  }
  SUBCASE("malformed JSON exits 1") {
    const std::string path = write_temp("nogo_bad.json", "{broken");
    CHECK(run_cli("joint-spectrum " + path).exit_code == 1);
  }
  SUBCASE("empty operator list exits 1") {
    const std::string path =
        write_temp("nogo_empty_ops.json", R"({"operators": []})");
    CHECK(run_cli("joint-spectrum " + path).exit_code == 1);
  }
  SUBCASE("non-commuting input exits 2") {
    const std::string path = write_temp(
        "nogo_noncomm.json",
        R"({"operators": [[[0,1],[1,0]], [[0,[0,-1]],[[0,1],0]]]})");
    CHECK(run_cli("joint-spectrum " + path).exit_code == 2);
  }
}

TEST_CASE("ks-check") {
  SUBCASE("bundled 18-ray catalog: NONE by both methods") {
    for (const char* method : {"backtracking", "exhaustive"}) {
      const RunResult r = run_cli("ks-check " + data_path("ks18_dim4.json") +
                                  " --method " + method);
      REQUIRE(r.exit_code == 0);
      const json report = json::parse(r.out);
      CHECK(report["verdict"]["value_map"] == "none");
      CHECK(report["verdict"]["complete_bases"] == 9);
    }
  }
  SUBCASE("standard basis: assignment, exit 0") {
    const RunResult r = run_cli("ks-check " + data_path("basis3_dim3.json"));
    REQUIRE(r.exit_code == 0);
    const json report = json::parse(r.out);
    CHECK(report["verdict"]["value_map"] == "exists");
    CHECK(report["verdict"]["assignment"] == json::parse("[0,0,1]"));
  }
  SUBCASE("tiny budget exits 4") {
    const RunResult r =
        run_cli("--budget 10 ks-check " + data_path("ks18_dim4.json"));
    CHECK(r.exit_code == 4);
  }
  SUBCASE("expectation mismatch exits 3") {
    const std::string path = write_temp("nogo_mismatch.json", R"({
      "dim": 3, "expect": "uncolorable",
      "rays": [[1,0,0],[0,1,0],[0,0,1]]})");
    const RunResult r = run_cli("ks-check " + path);
    CHECK(r.exit_code == 3);
  }
}

TEST_CASE("ks-lift to dim 4") {
  const RunResult r = run_cli("ks-lift " + data_path("peres33_dim3.json") +
                              " --target-dim 4 --out /tmp/nogo_lift4.json");
  REQUIRE(r.exit_code == 0);
  const json report = json::parse(r.out);
  CHECK(report["verdict"]["dim"] == 4);
  CHECK(report["verdict"]["value_map"] == "none");
  CHECK(report["verdict"]["rays"] <= 2 * (33 + 1));
  CHECK(report["verdict"]["catalog"]["expect"] == "uncolorable");

  // The written catalog feeds straight back into ks-check.
  const RunResult again = run_cli("ks-check /tmp/nogo_lift4.json");
  REQUIRE(again.exit_code == 0);
  CHECK(json::parse(again.out)["verdict"]["value_map"] == "none");
}

TEST_CASE("bell") {
  SUBCASE("n = z with sigma_z is exact") {
    const RunResult r = run_cli("bell --n 0,0,1 --obs sz --samples 20000");
    REQUIRE(r.exit_code == 0);
    const json report = json::parse(r.out);
    CHECK(report["verdict"]["exact"] == 1.0);
    CHECK(report["verdict"]["monte_carlo"]["mean"] == 1.0);
  }
  SUBCASE("non-unit n exits 1") {
    CHECK(run_cli("bell --n 0,0,2 --obs sz").exit_code == 1);
  }
  SUBCASE("reports are byte-identical across reruns") {
    const std::string args = "--seed 42 bell --n 0,0,1 --obs sx --samples 50000";
    const RunResult a = run_cli(args);
    const RunResult b = run_cli(args);
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
  }
  SUBCASE("NOGO_SEED overrides only the default seed") {
    const RunResult via_env =
        run_cli("bell --n 0,0,1 --obs sx --samples 1000", "NOGO_SEED=77");
    const RunResult via_flag =
        run_cli("--seed 77 bell --n 0,0,1 --obs sx --samples 1000");
    const RunResult flag_wins =
        run_cli("--seed 77 bell --n 0,0,1 --obs sx --samples 1000",
                "NOGO_SEED=123");
    REQUIRE(via_env.exit_code == 0);
    CHECK(via_env.out == via_flag.out);
    CHECK(flag_wins.out == via_flag.out);
  }
}

TEST_CASE("bell-moments") {
  const RunResult rx =
      run_cli("bell-moments --mixture '0.5:1,0,0;0.5:-1,0,0' --samples 200000");
  REQUIRE(rx.exit_code == 0);
  const json x = json::parse(rx.out);
  CHECK(x["verdict"]["closed_form"][0][0].get<double>() ==
        doctest::Approx(4.0 / 3));
  CHECK(x["verdict"]["closed_form"][2][2].get<double>() ==
        doctest::Approx(1.0 / 3));

  const RunResult rz =
      run_cli("bell-moments --mixture '0.5:0,0,1;0.5:0,0,-1' --samples 200000");
  REQUIRE(rz.exit_code == 0);
  const json z = json::parse(rz.out);
  CHECK(z["verdict"]["closed_form"][2][2].get<double>() ==
        doctest::Approx(4.0 / 3));
  CHECK(x["verdict"]["closed_form"] != z["verdict"]["closed_form"]);
}

TEST_CASE("coexist") {
  SUBCASE("default pair") {
    const RunResult r = run_cli("coexist");
    REQUIRE(r.exit_code == 0);
    const json report = json::parse(r.out);
    CHECK(report["verdict"]["margin"].get<double>() < -0.1);
    CHECK(report["verdict"]["witness_fourth_member_least_eigenvalue_at_H0"]
              .get<double>() ==
          doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
  }
  SUBCASE("custom orthogonal pair has margin 0") {
    const RunResult r = run_cli("coexist --pair custom --a 0,0,1 --b 0,0,-1");
    REQUIRE(r.exit_code == 0);
    CHECK(std::abs(json::parse(r.out)["verdict"]["margin"].get<double>()) <=
          1e-9);
  }
}

TEST_CASE("spekkens-refute") {
  const RunResult r =
      run_cli("spekkens-refute " + data_path("candidate_e2_violation.json"));
  REQUIRE(r.exit_code == 0);
  const json report = json::parse(r.out);
  CHECK(report["verdict"]["status"] == "refuted");
  CHECK(report["verdict"]["first_violation"]["violated"] == "E2");
  CHECK(report["verdict"]["first_violation"]["i"] == 1);
  CHECK(report["verdict"]["first_violation"]["j"] == 1);
}

TEST_CASE("extend") {
  SUBCASE("constant function") {
    const RunResult r = run_cli("extend " + data_path("pointsample_const1.json"));
    REQUIRE(r.exit_code == 0);
    const json report = json::parse(r.out);
    CHECK(report["verdict"]["status"] == "translated-linear");
    CHECK(report["verdict"]["w0"] == json::parse("[1.0]"));
    CHECK(report["verdict"]["linear_part_norm"].get<double>() < 1e-12);
  }
  SUBCASE("worked affine example") {
    const RunResult r =
        run_cli("extend " + data_path("pointsample_affine_dim2.json"));
    REQUIRE(r.exit_code == 0);
    CHECK(json::parse(r.out)["verdict"]["status"] == "translated-linear");
  }
}

TEST_CASE("text format stays parseable line-by-line") {
  const RunResult r = run_cli("--format text coexist");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("verdict.margin: ") != std::string::npos);
  CHECK(r.out.find("tool_version: \"0.1.0\"") != std::string::npos);
}
