#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ecodrive/cli.hpp"
#include "ecodrive/scenario.hpp"

namespace fs = std::filesystem;
using ecodrive::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "ecodrive_cli_tests";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(call({}).code, 2);
  EXPECT_EQ(call({"frobnicate"}).code, 2);
  EXPECT_EQ(call({"solve", "route1", "--objective", "fuel", "--eta", "1.5"}).code, 2);
  EXPECT_EQ(call({"solve", "route1", "--objective", "speed"}).code, 2);
  EXPECT_EQ(call({"solve", "no-such-route"}).code, 2);
  EXPECT_EQ(call({"solve", "route1", "--eta", "0.5", "--deterministic"}).code, 2);
  EXPECT_EQ(call({"sweep", "route1", "--etas", ""}).code, 2);
  EXPECT_EQ(call({"solve", "route1", "--kernel", "sse9"}).code, 2);
}

TEST(Cli, HelpSucceeds) {
  const Result r = call({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("solve"), std::string::npos);
  EXPECT_EQ(call({"solve", "--help"}).code, 0);
}

TEST(Cli, InfeasibleProblemsExitThree) {
  const fs::path dir = scratch_dir();
  nlohmann::json doc = ecodrive::scenario_to_json(*ecodrive::builtin_scenario("route1"));
  doc["route"]["deadline"] = 40.0;
  {
    std::ofstream f(dir / "tight.json");
    f << doc.dump(2);
  }
  const Result r = call({"solve", (dir / "tight.json").string(), "--objective", "time"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("infeasible"), std::string::npos);
  EXPECT_EQ(call({"solve", "route1-robust-moderate", "--eta", "1.0"}).code, 3);
}

TEST(Cli, SolveWritesTraceableOutputs) {
  const fs::path dir = scratch_dir();
  const Result r = call({"solve", "route1", "--objective", "time", "--deterministic", "--out",
                         (dir / "t.csv").string(), "--metrics-out", (dir / "m.csv").string(), "--plot",
                         (dir / "v.svg").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string hash = ecodrive::scenario_hash(*ecodrive::builtin_scenario("route1"));
  EXPECT_EQ(slurp(dir / "t.csv").rfind("# scenario_hash=" + hash, 0), 0u);
  EXPECT_NE(slurp(dir / "m.csv").find(hash), std::string::npos);
  EXPECT_NE(slurp(dir / "v.svg").find("<svg"), std::string::npos);
  EXPECT_NE(r.out.find("op-time"), std::string::npos);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  const fs::path dir = scratch_dir();
  for (const char* threads : {"1", "2"}) {
    ASSERT_EQ(call({"--threads", threads, "solve", "route1", "--out", (dir / "a.csv").string()}).code, 0);
    ASSERT_EQ(call({"--threads", threads, "solve", "route1", "--out", (dir / "b.csv").string()}).code, 0);
    EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
  }
  ASSERT_EQ(call({"idm", "route1", "--realize", "--seed", "9", "--out", (dir / "c.csv").string()}).code, 0);
  ASSERT_EQ(call({"idm", "route1", "--realize", "--seed", "9", "--out", (dir / "d.csv").string()}).code, 0);
  EXPECT_EQ(slurp(dir / "c.csv"), slurp(dir / "d.csv"));
}

TEST(Cli, EvaluateWithoutSeedUsesFixedDefault) {
  const fs::path dir = scratch_dir();
  ASSERT_EQ(call({"solve", "route1", "--out", (dir / "plan.csv").string()}).code, 0);
  const Result a = call({"evaluate", (dir / "plan.csv").string(), "--scenario", "route1", "--samples", "500"});
  const Result b = call({"evaluate", (dir / "plan.csv").string(), "--scenario", "route1", "--samples", "500",
                         "--out", (dir / "eval").string()});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_TRUE(fs::exists(dir / "eval" / "violations.csv"));
  EXPECT_TRUE(fs::exists(dir / "eval" / "histogram.csv"));
  EXPECT_EQ(call({"evaluate", "--scenario", "route1"}).code, 2);
}

TEST(Cli, TableRowsAndWarnings) {
  const fs::path dir = scratch_dir();
  ASSERT_EQ(call({"solve", "route1", "--objective", "time", "--out", (dir / "time.csv").string()}).code, 0);
  ASSERT_EQ(call({"solve", "route1", "--objective", "fuel", "--out", (dir / "fuel.csv").string()}).code, 0);
  ASSERT_EQ(call({"idm", "route2", "--out", (dir / "idm2.csv").string()}).code, 0);

  const Result single = call({"table", (dir / "time.csv").string()});
  ASSERT_EQ(single.code, 0);
  EXPECT_EQ(single.out.find("Change"), std::string::npos);

  const Result pair = call({"table", (dir / "time.csv").string(), (dir / "fuel.csv").string()});
  ASSERT_EQ(pair.code, 0);
  EXPECT_NE(pair.out.find("Change (op-fuel)"), std::string::npos);
  EXPECT_TRUE(pair.err.empty());

  const Result mixed = call({"table", (dir / "time.csv").string(), (dir / "idm2.csv").string()});
  ASSERT_EQ(mixed.code, 0);
  EXPECT_NE(mixed.err.find("warning"), std::string::npos);
  EXPECT_NE(mixed.out.find("Change (idm)"), std::string::npos);
}

TEST(Cli, SweepSingleEtaGivesOneRow) {
  const fs::path dir = scratch_dir() / "sweep";
  const Result r = call({"sweep", "route1-robust-moderate", "--objective", "fuel", "--etas", "0.5", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream f(dir / "sweep.csv");
  std::string line;
  int rows = 0;
  while (std::getline(f, line)) rows += (!line.empty() && line[0] != '#' && line[0] != 'e') ? 1 : 0;
  EXPECT_EQ(rows, 1);
}

TEST(Cli, ScenarioListingAndExport) {
  const Result list = call({"scenarios"});
  ASSERT_EQ(list.code, 0);
  EXPECT_NE(list.out.find("route2-robust-heavy"), std::string::npos);
  const fs::path dir = scratch_dir();
  ASSERT_EQ(call({"export-scenario", "route2", "--out", (dir / "r2.json").string()}).code, 0);
  EXPECT_EQ(ecodrive::load_scenario(dir / "r2.json"), *ecodrive::builtin_scenario("route2"));
  EXPECT_EQ(call({"export-scenario", "route9", "--out", (dir / "x.json").string()}).code, 2);
}
