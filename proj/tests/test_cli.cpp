#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "pairglm/serialize.hpp"
#include "pairglm/solver.hpp"

namespace fs = std::filesystem;

namespace {

const char* kTinyCsv =
    "x1,x2,x3,y\n"
    "0.52,1.21,-0.33,2.10\n"
    "-1.12,0.45,0.87,-0.92\n"
    "0.31,-0.74,1.52,0.41\n"
    "1.83,0.92,-1.21,3.55\n"
    "-0.61,-1.42,0.23,-1.80\n"
    "0.95,0.12,0.71,1.23\n"
    "-1.52,0.63,-0.94,-2.21\n"
    "0.21,1.14,0.43,1.05\n"
    "1.14,-0.81,-0.52,0.93\n"
    "-0.44,0.32,1.91,0.12\n"
    "0.77,-1.05,0.36,0.78\n"
    "-0.93,0.58,-1.13,-1.35\n";

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / "pairglm_cli_test") {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::string& args) {
  const std::string command = std::string(PAIRGLM_CLI_PATH) + " " + args + " 2>/dev/null";
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

void write_tiny(const std::string& path) {
  std::ofstream out(path);
  out << kTinyCsv;
}

}  // namespace

TEST_CASE("fit: missing response column exits 1") {
  TempDir dir;
  write_tiny(dir.file("data.csv"));
  const int rc = run_cli("fit --data " + dir.file("data.csv") +
                         " --response nope --penalty l2 --alpha 0.5 --lambda 0.1 --out " +
                         dir.file("fit.json"));
  CHECK(rc == 1);
  CHECK_FALSE(fs::exists(dir.file("fit.json")));
}

TEST_CASE("fit: l2 penalty writes a valid bundle with hereditary support") {
  TempDir dir;
  write_tiny(dir.file("data.csv"));
  const int rc = run_cli("fit --data " + dir.file("data.csv") +
                         " --response y --penalty l2 --alpha 0.5 --lambda 0.05 --out " +
                         dir.file("fit.json"));
  REQUIRE(rc == 0);
  const auto bundle = pairglm::fit_bundle_from_json(pairglm::read_file(dir.file("fit.json")));
  CHECK(bundle.fit.converged);
  CHECK(bundle.fit.support(0, 0) == 1);
  for (arma::uword j = 1; j <= 3; ++j) {
    for (arma::uword k = 1; k <= 3; ++k) {
      if (bundle.fit.support(j, k)) {
        CHECK(bundle.fit.support(j, 0) == 1);
        CHECK(bundle.fit.support(0, k) == 1);
      }
    }
  }
  // golden values frozen from this fixed dataset and configuration
  CHECK(bundle.fit.objective == doctest::Approx(0.12523266358276988).epsilon(1e-6));
  CHECK(bundle.spec.lambda3 == doctest::Approx(0.025));
}

TEST_CASE("fit: lambda at the zero threshold leaves the intercept only") {
  TempDir dir;
  write_tiny(dir.file("data.csv"));
  const int rc = run_cli("fit --data " + dir.file("data.csv") +
                         " --response y --penalty l2 --alpha 0.5 --lambda 50 --out " +
                         dir.file("fit.json"));
  REQUIRE(rc == 0);
  const auto bundle = pairglm::fit_bundle_from_json(pairglm::read_file(dir.file("fit.json")));
  CHECK(arma::accu(bundle.fit.support) == 1);
}

TEST_CASE("fit and simulate are byte-identical across repeated runs") {
  TempDir dir;
  write_tiny(dir.file("data.csv"));
  const std::string fit_args = "fit --data " + dir.file("data.csv") +
                               " --response y --penalty hybrid --alpha 0.4 --lambda 0.08 "
                               "--seed 9 --out ";
  REQUIRE(run_cli(fit_args + dir.file("a.json")) == 0);
  REQUIRE(run_cli(fit_args + dir.file("b.json")) == 0);
  CHECK(pairglm::read_file(dir.file("a.json")) == pairglm::read_file(dir.file("b.json")));

  const std::string scenario =
      R"({"p": 5, "n_train": 40, "n_test": 30, "n_valid": 30, "n_true_main": 3,)"
      R"( "n_true_inter": 2, "seed": 4})";
  {
    std::ofstream out(dir.file("scenario.json"));
    out << scenario;
  }
  const std::string sim_args = "simulate --scenario " + dir.file("scenario.json") +
                               " --method l2 --replicates 1 --threads 1 --out ";
  REQUIRE(run_cli(sim_args + dir.file("s1")) == 0);
  REQUIRE(run_cli(sim_args + dir.file("s2")) == 0);
  CHECK(pairglm::read_file(dir.file("s1_summary.csv")) ==
        pairglm::read_file(dir.file("s2_summary.csv")));
  CHECK(pairglm::read_file(dir.file("s1_replicates.json")) ==
        pairglm::read_file(dir.file("s2_replicates.json")));
}

TEST_CASE("simulate: invalid scenario key exits 1") {
  TempDir dir;
  {
    std::ofstream out(dir.file("scenario.json"));
    out << R"({"p": 5, "covariance": "toeplitz"})";
  }
  CHECK(run_cli("simulate --scenario " + dir.file("scenario.json") + " --out " +
                dir.file("s")) == 1);
}

TEST_CASE("simulate: summary carries the expected header") {
  TempDir dir;
  {
    std::ofstream out(dir.file("scenario.json"));
    out << R"({"p": 6, "n_train": 50, "n_test": 30, "n_valid": 30,)"
        << R"( "n_true_main": 3, "n_true_inter": 2, "seed": 2})";
  }
  REQUIRE(run_cli("simulate --scenario " + dir.file("scenario.json") +
                  " --replicates 2 --threads 1 --out " + dir.file("sim")) == 0);
  const std::string csv = pairglm::read_file(dir.file("sim_summary.csv"));
  CHECK(csv.find("n_true_inter,method,relaxed,rel_ssr,rel_ssr_se,fdr,fdr_se,tpr,tpr_se,"
                 "n_interactions,n_interactions_se") == 0);
}

TEST_CASE("path, predict, df subcommands round-trip") {
  TempDir dir;
  write_tiny(dir.file("data.csv"));
  REQUIRE(run_cli("path --data " + dir.file("data.csv") +
                  " --response y --penalty l2 --grid 2x6 --threads 1 --out " +
                  dir.file("path")) == 0);
  CHECK(fs::exists(dir.file("path_metrics.csv")));
  CHECK(fs::exists(dir.file("path_best.json")));
  const std::string metrics = pairglm::read_file(dir.file("path_metrics.csv"));
  CHECK(std::count(metrics.begin(), metrics.end(), '\n') == 13);  // header + 12 points

  REQUIRE(run_cli("predict --model " + dir.file("path_best.json") + " --data " +
                  dir.file("data.csv") + " --response y --out " + dir.file("pred.csv")) == 0);
  const std::string pred = pairglm::read_file(dir.file("pred.csv"));
  CHECK(pred.rfind("linear_predictor", 0) == 0);

  REQUIRE(run_cli("df --model " + dir.file("path_best.json") + " --data " +
                  dir.file("data.csv") + " --response y --out " + dir.file("df.json")) == 0);
  const std::string df = pairglm::read_file(dir.file("df.json"));
  CHECK(df.find("\"df\":") != std::string::npos);
}
