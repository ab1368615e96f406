#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

RunResult run(const std::string& args) {
  const fs::path out = fs::temp_directory_path() / "hetrob_cli_out.txt";
  const std::string cmd =
      std::string(HETROB_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out);
  std::ostringstream text;
  text << in.rdbuf();
  return {WEXITSTATUS(status), text.str()};
}

fs::path write_temp(const std::string& name, const std::string& contents) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << contents;
  return p;
}

const std::string kScenarioJson = R"({
  "clean": {"kind": "point_mass", "mean": [0.0]},
  "adversary": {"kind": "fixed_outlier", "value": [1.0]},
  "truth": [0.0],
  "profile": {"kind": "power_law", "q": 3.0, "n": 50}
})";

const std::string kConfigJson = R"({
  "scenario": {
    "clean": {"kind": "point_mass", "mean": [0.0]},
    "adversary": {"kind": "fixed_outlier", "value": [1.0]},
    "truth": [0.0],
    "profile": {"kind": "power_law", "q": 3.0, "n": 100}
  },
  "trials": 20,
  "estimators": [{"kind": "mean"}, {"kind": "threshold"}],
  "metrics": [{"kind": "mse"}],
  "root_seed": 42,
  "q_grid": [1.0, 3.0]
})";

}  // namespace

TEST_CASE("estimate: optimal weighted mean on a small CSV") {
  const auto csv = write_temp("mean3.csv", "x1,lambda\n1,0\n2,0.5\n3,0.9\n");
  const auto r = run("estimate --data " + csv.string() + " --method mean-optimal --seed 1");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("estimate: [") != std::string::npos);
  CHECK(r.output.find("effective sample size") != std::string::npos);
}

TEST_CASE("estimate: malformed CSV exits 2 with a line number") {
  const auto csv = write_temp("bad.csv", "x1,lambda\n1,0\nnope,0.2\n");
  const auto r = run("estimate --data " + csv.string() + " --method mean-optimal --seed 1");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("line 3") != std::string::npos);
}

TEST_CASE("estimate: lambda out of range exits 2") {
  const auto csv = write_temp("range.csv", "x1,lambda\n1,0\n2,1.2\n");
  const auto r = run("estimate --data " + csv.string() + " --method mean-optimal --seed 1");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("lambda out of range at line 3") != std::string::npos);
}

TEST_CASE("estimate: singular OLS design exits 3") {
  const auto csv = write_temp("singular.csv", "w1,y,lambda\n0,1,0\n0,2,0\n");
  const auto r = run("estimate --data " + csv.string() + " --method ols --seed 1");
  CHECK(r.exit_code == 3);
  CHECK(r.output.find("singular design") != std::string::npos);
}

TEST_CASE("estimate: empty threshold selection exits 3") {
  const auto csv = write_temp("thresh.csv", "x1,lambda\n1,0.5\n2,0.9\n");
  const auto r = run("estimate --data " + csv.string() +
                     " --method threshold --t 0.1 --seed 1");
  CHECK(r.exit_code == 3);
  CHECK(r.output.find("empty selection") != std::string::npos);
}

TEST_CASE("simulate output round-trips into estimate") {
  const auto scenario = write_temp("scenario.json", kScenarioJson);
  const fs::path data = fs::temp_directory_path() / "sim.csv";
  const auto sim =
      run("simulate --scenario " + scenario.string() + " --out " + data.string() +
          " --seed 9");
  REQUIRE(sim.exit_code == 0);
  const auto est = run("estimate --data " + data.string() + " --method median --seed 1");
  CHECK(est.exit_code == 0);
}

TEST_CASE("simulate prints an entropy seed when none is given") {
  const auto scenario = write_temp("scenario2.json", kScenarioJson);
  const auto r = run("simulate --scenario " + scenario.string() + " --out - ");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("seed: ") != std::string::npos);
}

TEST_CASE("bench writes the sweep CSV") {
  const auto config = write_temp("config.json", kConfigJson);
  const fs::path out = fs::temp_directory_path() / "bench.csv";
  const fs::path json = fs::temp_directory_path() / "bench.json";
  const auto r = run("bench --config " + config.string() + " --out " + out.string() +
                     " --json " + json.string());
  REQUIRE(r.exit_code == 0);
  std::ifstream in(out);
  std::string header;
  std::getline(in, header);
  CHECK(header == "q,estimator,metric,value,stderr,n,trials,seed");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) rows += line.empty() ? 0 : 1;
  CHECK(rows == 4);  // 2 q-points x 2 estimators x 1 metric
  CHECK(fs::exists(json));
}

TEST_CASE("bench rejects invalid configs with a JSON-pointer path") {
  const auto zero = write_temp("zero.json", R"({
    "scenario": {"clean": {"kind": "point_mass", "mean": [0.0]},
                 "truth": [0.0],
                 "profile": {"kind": "power_law", "q": 1.0, "n": 10}},
    "trials": 0,
    "estimators": [{"kind": "mean"}]
  })");
  const fs::path out = fs::temp_directory_path() / "unused.csv";
  const auto r = run("bench --config " + zero.string() + " --out " + out.string());
  CHECK(r.exit_code == 2);

  const auto unknown = write_temp("unknown.json", R"({
    "scenario": {"clean": {"kind": "point_mass", "mean": [0.0]},
                 "truth": [0.0],
                 "profile": {"kind": "power_law", "q": 1.0, "n": 10}},
    "trials": 5,
    "estimators": [{"kind": "super-estimator"}]
  })");
  const auto r2 = run("bench --config " + unknown.string() + " --out " + out.string());
  CHECK(r2.exit_code == 2);
  CHECK(r2.output.find("/estimators/0/kind") != std::string::npos);
  CHECK(r2.output.find("optimal_linear") != std::string::npos);  // lists valid names
}

TEST_CASE("bundled appendix-A config runs") {
  const fs::path config = fs::path(HETROB_CONFIG_DIR) / "bounded_appendixA.json";
  REQUIRE(fs::exists(config));
  const fs::path tmp = fs::temp_directory_path() / "appendixA_small.json";
  {
    // shrink the bundled config so the smoke test runs fast
    std::ifstream in(config);
    std::ostringstream text;
    text << in.rdbuf();
    std::string body = text.str();
    const auto pos = body.find("\"trials\"");
    REQUIRE(pos != std::string::npos);
    const auto colon = body.find(':', pos);
    const auto comma = body.find(',', colon);
    body.replace(colon + 1, comma - colon - 1, " 10");
    const auto npos_ = body.find("\"n\"");
    REQUIRE(npos_ != std::string::npos);
    const auto ncolon = body.find(':', npos_);
    const auto nend = body.find_first_of(",}", ncolon);
    body.replace(ncolon + 1, nend - ncolon - 1, " 100");
    std::ofstream(tmp) << body;
  }
  const fs::path out = fs::temp_directory_path() / "appendixA.csv";
  const auto r = run("bench --config " + tmp.string() + " --out " + out.string());
  REQUIRE(r.exit_code == 0);
  std::ifstream in(out);
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) rows += line.empty() ? 0 : 1;
  CHECK(rows > 5);  // header + sweep rows
}

TEST_CASE("rates emits the overlay table") {
  const auto profile = write_temp("profile.csv", "lambda\n0\n0\n0.3\n0.9\n");
  const auto r = run("rates --profile " + profile.string() + " --k 1 --r 1");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("quantity,x,value") != std::string::npos);
  CHECK(r.output.find("lecam_lb") != std::string::npos);
  CHECK(r.output.find("delta_star") != std::string::npos);
}

TEST_CASE("verify passes with default-style flags and fails input checks") {
  const auto ok = run("verify --n 16 --cases 5 --seed 5 --no-color");
  CHECK(ok.exit_code == 0);
  CHECK(ok.output.find("PASS") != std::string::npos);
  CHECK(ok.output.find("FAIL") == std::string::npos);

  CHECK(run("verify --cases 0 --seed 1").exit_code == 2);
  CHECK(run("verify --n 1 --seed 1").exit_code == 2);
}

TEST_CASE("unknown subcommand exits 2") {
  CHECK(run("frobnicate").exit_code == 2);
}
