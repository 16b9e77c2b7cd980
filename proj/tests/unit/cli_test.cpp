#include "agentex/cli.hpp"
#include "agentex/instance_io.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace agentex {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = 0;
  std::string out, err;
  io::Json json() const { return io::Json::parse(out); }
};

Result run(const std::vector<std::string>& args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(args, in, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string data(const std::string& name) { return std::string(AGENTEX_DATA_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "agentex_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

TEST(Cli, SolveExampleDelivery) {
  const auto r = run({"solve", "--task", "delivery", data("example1.json")});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  const auto doc = r.json();
  EXPECT_TRUE(doc["feasible"].get<bool>());
  EXPECT_EQ(doc["surplus_or_deficit"], 8);
  EXPECT_TRUE(doc.contains("task"));
  EXPECT_TRUE(doc.contains("witness"));
}

TEST(Cli, SolveConvergecastTwoAgentsIsInfeasible) {
  const auto r = run({"solve", "--task", "convergecast", data("two-agents-4-4.json")});
  EXPECT_EQ(r.code, cli::kInfeasible);
  EXPECT_FALSE(r.json()["feasible"].get<bool>());
}

TEST(Cli, GeneratedOddPartitionIsInfeasible) {
  const auto gen = run({"gen", "partition-digraph", "--weights", "1,2"});
  ASSERT_EQ(gen.code, cli::kOk) << gen.err;
  const auto r = run({"solve", "--task", "delivery", "-"}, gen.out);
  EXPECT_EQ(r.code, cli::kInfeasible) << r.err;
}

TEST(Cli, GeneratedEqualPartitionIsFeasible) {
  const auto gen = run({"gen", "partition-digraph", "--weights", "1,1"});
  ASSERT_EQ(gen.code, cli::kOk) << gen.err;
  EXPECT_EQ(run({"solve", "--task", "delivery", "-"}, gen.out).code, cli::kOk);
}

TEST(Cli, EmitTablesAddsPotentials) {
  const auto r = run({"solve", "--task", "delivery", "--emit-tables", data("example1.json")});
  ASSERT_EQ(r.code, cli::kOk);
  EXPECT_TRUE(r.json().contains("tables"));
}

TEST(Cli, ScheduleIsWrittenAndReplays) {
  const fs::path out = scratch("example1_schedule.json");
  const auto r = run({"schedule", "--task", "delivery", data("example1.json"), "-o", out.string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  ASSERT_TRUE(fs::exists(out));
  const auto check = run({"validate", data("example1.json"), out.string()});
  EXPECT_EQ(check.code, cli::kOk) << check.err << check.out;
}

TEST(Cli, ValidateRejectsTamperedSchedule) {
  const fs::path out = scratch("tampered.json");
  ASSERT_EQ(run({"schedule", "--task", "delivery", data("example1.json"), "-o", out.string()}).code, cli::kOk);
  io::Json doc;
  {
    std::ifstream in(out);
    in >> doc;
  }
  auto& steps = doc.contains("schedule") ? doc["schedule"]["steps"] : doc["steps"];
  ASSERT_FALSE(steps.empty());
  steps.erase(steps.begin());
  {
    std::ofstream o(out);
    o << doc.dump();
  }
  EXPECT_NE(run({"validate", data("example1.json"), out.string()}).code, cli::kOk);
}

TEST(Cli, ScheduleConvergecastIsUsageError) {
  EXPECT_EQ(run({"schedule", "--task", "convergecast", data("example1.json")}).code, cli::kUsage);
}

TEST(Cli, LineBroadcastScheduleNeedsSource) {
  EXPECT_EQ(run({"schedule", "--task", "broadcast", data("example1.json")}).code, cli::kUsage);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(run({"solve"}).code, cli::kUsage);
  EXPECT_EQ(run({"solve", "--task", "teleport", data("example1.json")}).code, cli::kUsage);
  EXPECT_EQ(run({"solve", "/nonexistent/instance.json"}).code, cli::kUsage);
  EXPECT_EQ(run({"solve", "-"}, "{not json").code, cli::kUsage);
}

TEST(Cli, GeneratorsAreDeterministicForASeed) {
  for (const std::string what : {"line", "tree"}) {
    const auto a = run({"gen", what, "--seed", "11", "-n", "9"});
    const auto b = run({"gen", what, "--seed", "11", "-n", "9"});
    const auto c = run({"gen", what, "--seed", "12", "-n", "9"});
    ASSERT_EQ(a.code, cli::kOk) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out, c.out);
  }
}

TEST(Cli, SolveOutputIsByteStable) {
  const auto a = run({"solve", "--task", "broadcast", data("example1.json")});
  const auto b = run({"solve", "--task", "broadcast", data("example1.json")});
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, GeneratedLinesScheduleAndValidate) {
  for (int seed = 1; seed <= 20; ++seed) {
    const auto gen = run({"gen", "line", "--seed", std::to_string(seed), "-n", "7"});
    ASSERT_EQ(gen.code, cli::kOk);
    const auto r = run({"schedule", "--task", "delivery", "-"}, gen.out);
    EXPECT_TRUE(r.code == cli::kOk || r.code == cli::kInfeasible) << r.err;
  }
}

TEST(Cli, OracleExitCodesFollowTheDecision) {
  EXPECT_EQ(run({"oracle", "search", "--task", "delivery", data("two-agents-4-4.json")}).code, cli::kInfeasible);
  const std::string feasible = R"({"kind": "line", "agents": [{"position": 0, "energy": 0},
      {"position": 1, "energy": "5/2"}, {"position": 2, "energy": 1}, {"position": 3, "energy": 3}]})";
  const auto r = run({"oracle", "max-surplus", "--task", "delivery", "-"}, feasible);
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(r.json()["max_surplus"], 1);
}

TEST(Cli, TreeInstanceSolves) {
  const auto gen = run({"gen", "tree", "--seed", "3", "-n", "6", "--agents", "3"});
  ASSERT_EQ(gen.code, cli::kOk) << gen.err;
  for (const std::string task : {"convergecast", "broadcast"}) {
    const auto r = run({"solve", "--task", task, "-"}, gen.out);
    EXPECT_TRUE(r.code == cli::kOk || r.code == cli::kInfeasible) << task << ": " << r.err;
  }
}

TEST(Cli, BenchSmallSizesPass) {
  const auto r = run({"bench", "--sizes", "1000,10000"});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
}

}  // namespace
}  // namespace agentex
