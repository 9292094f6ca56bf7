#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cli.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kData = DAECERT_DATA_DIR;
const std::string kGolden = DAECERT_GOLDEN_DIR;

struct CliRun {
  int code = -1;
  std::string out, err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = daecert::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string model(const std::string& name) { return kData + "/models/" + name; }

// Paths depend on the checkout location and are not compared.
bool path_key(const std::string& key) { return key == "model" || key == "case"; }

void expect_matches(const json& got, const json& want, const std::string& where) {
  if (want.is_number() && got.is_number()) {
    const double a = got.get<double>(), b = want.get<double>();
    EXPECT_LE(std::fabs(a - b), 1e-6 * (1.0 + std::fabs(b))) << where << ": " << a << " vs " << b;
    return;
  }
  ASSERT_EQ(got.type_name(), std::string(want.type_name())) << where;
  if (want.is_object()) {
    for (const auto& [k, v] : want.items()) {
      ASSERT_TRUE(got.contains(k)) << where << "." << k << " missing";
      if (!path_key(k)) expect_matches(got.at(k), v, where + "." + k);
    }
    for (const auto& [k, v] : got.items()) EXPECT_TRUE(want.contains(k)) << where << "." << k << " unexpected";
  } else if (want.is_array()) {
    ASSERT_EQ(got.size(), want.size()) << where;
    for (std::size_t i = 0; i < want.size(); ++i) {
      expect_matches(got.at(i), want.at(i), where + "[" + std::to_string(i) + "]");
    }
  } else {
    EXPECT_EQ(got, want) << where;
  }
}

// DAECERT_UPDATE_GOLDEN=1 rewrites the stored report instead of comparing.
void check_golden(const std::string& name, const std::string& report) {
  const fs::path path = fs::path(kGolden) / (name + ".json");
  const json got = json::parse(report);
  if (const char* upd = std::getenv("DAECERT_UPDATE_GOLDEN"); upd && std::string(upd) == "1") {
    std::ofstream(path) << got.dump(2) << "\n";
    return;
  }
  std::ifstream in(path);
  ASSERT_TRUE(in) << "missing golden file " << path;
  json want;
  in >> want;
  expect_matches(got, want, name);
}

class CliEnv : public ::testing::Test {
 protected:
  void SetUp() override { unsetenv("DAE_CERTIFY_SOLVER_TOL"); }
  void TearDown() override { unsetenv("DAE_CERTIFY_SOLVER_TOL"); }
};

using Cli = CliEnv;

}  // namespace

TEST_F(Cli, CertifyScalarAboveGainSucceeds) {
  const CliRun r = run({"certify", "--model", model("scalar.json"), "--supply", "l2gain", "--gamma", "1.01"});
  EXPECT_EQ(r.code, 0) << r.err;
  const json rep = json::parse(r.out);
  EXPECT_EQ(rep.at("result").at("outcome"), "certified");
  EXPECT_TRUE(rep.at("result").at("certificate").at("verification").at("pass").get<bool>());
  check_golden("certify_scalar_1.01", r.out);
}

TEST_F(Cli, CertifyScalarBelowGainIsInfeasible) {
  const CliRun r = run({"certify", "--model", model("scalar.json"), "--supply", "l2gain", "--gamma", "0.99"});
  EXPECT_EQ(r.code, 2) << r.err;
  const json rep = json::parse(r.out);
  EXPECT_EQ(rep.at("result").at("outcome"), "infeasible");
  EXPECT_TRUE(rep.at("result").at("infeasibility_audit").at("pass").get<bool>());
  check_golden("certify_scalar_0.99", r.out);
}

TEST_F(Cli, CertifyMinimizesGainWithoutLevel) {
  const CliRun r = run({"certify", "--model", model("scalar.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  const json rep = json::parse(r.out);
  EXPECT_NEAR(rep.at("result").at("certificate").at("gamma").get<double>(), 1.0, 1e-3);
}

TEST_F(Cli, MissingModelIsInputError) {
  const CliRun r = run({"certify", "--model", "missing.json"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("missing.json"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
}

TEST_F(Cli, UsageErrorsAreInputErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"solve"}).code, 1);
  EXPECT_EQ(run({"certify"}).code, 1);
  EXPECT_EQ(run({"certify", "--model", model("scalar.json"), "--supply", "energy"}).code, 1);
  EXPECT_EQ(run({"certify", "--model", model("example1.json")}).code, 1);
  EXPECT_EQ(run({"sos", "--model", model("scalar.json")}).code, 1);
  EXPECT_EQ(run({"power39", "--stage", "solve"}).code, 1);
  EXPECT_EQ(run({"power39", "--step", "3"}).code, 1);
  EXPECT_EQ(run({"power39", "--lines", "30,x"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, SosExampleOneDegreeFour) {
  const CliRun r = run({"sos", "--model", model("example1.json"), "--degV", "4", "--eps", "1e-3"});
  EXPECT_EQ(r.code, 0) << r.err;
  const json rep = json::parse(r.out);
  EXPECT_EQ(rep.at("outcome"), "feasible");
  EXPECT_LE(rep.at("certificate").at("max_residual").get<double>(), 1e-6);
  EXPECT_TRUE(rep.at("certificate").at("polynomials").contains("V"));
  check_golden("sos_example1_deg4", r.out);
}

TEST_F(Cli, SosExampleOneDegreeTwoOutcomeIsPinned) {
  const CliRun r = run({"sos", "--model", model("example1.json"), "--degV", "2", "--eps", "1e-3"});
  EXPECT_TRUE(r.code == 0 || r.code == 2) << r.err;
  check_golden("sos_example1_deg2", r.out);
}

TEST_F(Cli, SosFacialPruningReportsInfeasible) {
  const CliRun r = run({"sos", "--model", model("example1.json"), "--prune", "facial"});
  EXPECT_EQ(r.code, 2) << r.err;
}

TEST_F(Cli, SosUnstableStabilityQueryIsInfeasible) {
  const CliRun r = run({"sos", "--model", model("unstable.json"), "--degV", "2"});
  EXPECT_EQ(r.code, 2) << r.err;
  check_golden("sos_unstable", r.out);
}

TEST_F(Cli, EnvironmentOverridesDefaultTolerance) {
  setenv("DAE_CERTIFY_SOLVER_TOL", "1e-7", 1);
  EXPECT_DOUBLE_EQ(daecert::cli::default_solver_tol(), 1e-7);
  const CliRun r = run({"certify", "--model", model("scalar.json"), "--gamma", "1.01"});
  EXPECT_DOUBLE_EQ(json::parse(r.out).at("solver_tol").get<double>(), 1e-7);
  const CliRun flag = run({"certify", "--model", model("scalar.json"), "--gamma", "1.01", "--tol", "1e-9"});
  EXPECT_DOUBLE_EQ(json::parse(flag.out).at("solver_tol").get<double>(), 1e-9);
  setenv("DAE_CERTIFY_SOLVER_TOL", "abc", 1);
  EXPECT_DOUBLE_EQ(daecert::cli::default_solver_tol(), 1e-8);
}

TEST_F(Cli, ReportsAreDeterministic) {
  const std::vector<std::string> args{"sos", "--model", model("example1.json"), "--degV", "4"};
  EXPECT_EQ(run(args).out, run(args).out);
}

TEST_F(Cli, OutFlagWritesFile) {
  const fs::path path = fs::temp_directory_path() / "daecert_cli_report.json";
  fs::remove(path);
  const CliRun r = run({"certify", "--model", model("scalar.json"), "--gamma", "1.01", "--out", path.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  json rep;
  in >> rep;
  EXPECT_EQ(rep.at("exit_code"), 0);
}

TEST_F(Cli, PowerLinearizeStage) {
  const CliRun r = run({"power39", "--stage", "linearize", "--lines", "30,41,42,43", "--base", "43"});
  EXPECT_EQ(r.code, 0) << r.err;
  const json rep = json::parse(r.out);
  EXPECT_EQ(rep.at("status"), "ok");
  for (const char* k : {"dynamics", "constraint", "output"}) {
    EXPECT_LE(rep.at("stages").at("linearize").at("zero_mode").at(k).get<double>(), 1e-8) << k;
  }
  EXPECT_EQ(rep.at("config").at("lines"), json({30, 41, 42, 43}));
  EXPECT_FALSE(rep.at("stages").contains("reduce"));
  check_golden("power39_linearize", r.out);
  EXPECT_EQ(run({"power39", "--stage", "linearize"}).out, r.out);
}

TEST_F(Cli, PowerStageFailureExitsFour) {
  const CliRun r = run({"power39", "--case", "/nonexistent", "--stage", "linearize"});
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("loadflow"), std::string::npos) << r.err;
  EXPECT_EQ(json::parse(r.out).at("failed_stage"), "loadflow");
}
