#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "drt/records.hpp"

namespace fs = std::filesystem;
using drt::cli::run;

namespace {

const std::string kScenarios = DRT_SCENARIO_DIR;

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

drt::Table table_of(const std::string& csv) {
  std::istringstream in(csv);
  return drt::read_csv(in);
}

fs::path temp_file(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / ("drt_cli_" + name);
  std::ofstream(p) << content;
  return p;
}

}  // namespace

TEST(Cli, ToyGridFront) {
  const Result r = call({"front", "--grid", kScenarios + "/toy_grid.csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  const drt::Table t = table_of(r.out);
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_TRUE(t.flag(0, "is_contact"));
  EXPECT_FALSE(t.flag(1, "is_contact"));
  EXPECT_TRUE(t.flag(2, "is_contact"));
  EXPECT_DOUBLE_EQ(t.number(1, "mu"), 0.3);
  EXPECT_DOUBLE_EQ(t.number(1, "lambda"), -1);
}

TEST(Cli, RadarFrontContacts) {
  const Result r = call({"front", "--scenario", kScenarios + "/reference.json", "--resolution", "400"});
  ASSERT_EQ(r.code, 0) << r.err;
  const drt::Table t = table_of(r.out);
  ASSERT_EQ(t.rows.size(), 400u);
  EXPECT_TRUE(t.flag(0, "is_contact"));
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    const double xi = t.number(i, "xi");
    if (xi < 9.35) EXPECT_FALSE(t.flag(i, "is_contact")) << xi;
    if (xi > 9.45) EXPECT_TRUE(t.flag(i, "is_contact")) << xi;
  }
  EXPECT_EQ(drt::parse_front_table(t).points.size(), 400u);
}

TEST(Cli, EnvelopeJson) {
  const Result r = call({"--format", "json", "envelope", "--grid", kScenarios + "/toy_grid.csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  const drt::Table t = drt::table_from_json(nlohmann::json::parse(r.out));
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_DOUBLE_EQ(t.number(0, "mu"), 0.3);
}

TEST(Cli, PlanBudgets) {
  const Result r = call({"plan", "--scenario", kScenarios + "/reference.json", "--budgets", "1,7,15,0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const drt::Table t = table_of(r.out);
  ASSERT_EQ(t.rows.size(), 6u);
  EXPECT_EQ(t.number(0, "rho"), 0);
  EXPECT_NEAR(t.number(1, "rho"), 9.4070, 5e-4);
  EXPECT_NEAR(t.number(3, "rho"), 9.4070, 5e-4);
  EXPECT_NEAR(t.number(4, "rho"), 15, 1e-9);
  EXPECT_EQ(t.number(5, "trace"), 0);
  EXPECT_DOUBLE_EQ(t.number(5, "pd"), 1e-5);
  EXPECT_LT(t.number(0, "mixture_rate"), t.number(0, "waterfill_rate"));
}

TEST(Cli, SimulateReproducible) {
  const std::vector<std::string> args{"--seed", "7", "simulate", "--scenario", kScenarios + "/cfar.json",
                                      "--rho", "3", "--trials", "100000"};
  const Result a = call(args), b = call(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const drt::Table t = table_of(a.out);
  EXPECT_NEAR(t.number(1, "target"), 0.316227766017, 1e-12);
  EXPECT_LE(std::abs(t.number(1, "empirical") - 0.316227766017), 3 * std::sqrt(0.3162 * 0.6838 / 1e5));
  const Result other = call({"--seed", "8", "simulate", "--scenario", kScenarios + "/cfar.json", "--rho", "3",
                             "--trials", "100000"});
  EXPECT_NE(other.out, a.out);
}

TEST(Cli, OutputFileMatchesStdout) {
  const fs::path out = fs::temp_directory_path() / "drt_cli_plan.csv";
  const Result to_file =
      call({"--out", out.string(), "plan", "--scenario", kScenarios + "/reference.json", "--budgets", "1,7"});
  ASSERT_EQ(to_file.code, 0) << to_file.err;
  std::ifstream in(out, std::ios::binary);
  const std::string content((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(content, call({"plan", "--scenario", kScenarios + "/reference.json", "--budgets", "1,7"}).out);
}

TEST(Cli, VerifyPasses) {
  const Result r = call({"verify", "--fuzz-cases", "200", "--trials", "20000"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  const drt::Table t = table_of(r.out);
  for (std::size_t i = 0; i < t.rows.size(); ++i) EXPECT_EQ(t.cell(i, "status"), "pass") << t.cell(i, "check");
}

TEST(Cli, VerifyInjectedFaults) {
  const Result w = call({"verify", "--fuzz-cases", "10", "--trials", "2000", "--inject-fault", "wrong-weights"});
  EXPECT_EQ(w.code, 1);
  EXPECT_NE(w.out.find("mean_constraint"), std::string::npos);
  const Result o = call({"verify", "--fuzz-cases", "10", "--trials", "2000", "--inject-fault", "off-envelope"});
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.out.find("off_envelope"), std::string::npos);
}

TEST(Cli, FuzzCommand) {
  const Result r = call({"--seed", "3", "fuzz", "--cases", "50", "--grid-size", "40", "--shape", "collinear"});
  ASSERT_EQ(r.code, 0) << r.err;
  const drt::Table t = table_of(r.out);
  EXPECT_EQ(t.rows.size(), 50u);
  for (std::size_t i = 0; i < t.rows.size(); ++i) EXPECT_TRUE(t.flag(i, "pass"));
}

TEST(Cli, MalformedConfigExitsTwo) {
  const fs::path bad = temp_file("bad.json", R"({"gram":[[1,0],[0,1]],"mean_square_amp":1,"snapshots":4,
                                                 "noise_psd":1,"pfa":7})");
  const Result r = call({"plan", "--scenario", bad.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("pfa"), std::string::npos) << r.err;
  const fs::path broken = temp_file("broken.json", "{not json");
  EXPECT_EQ(call({"plan", "--scenario", broken.string()}).code, 2);
  const fs::path ragged = temp_file("ragged.csv", "design_id,cost,perf\na,0\n");
  EXPECT_EQ(call({"front", "--grid", ragged.string()}).code, 2);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(call({}).code, 2);
  EXPECT_EQ(call({"bogus"}).code, 2);
  EXPECT_EQ(call({"front"}).code, 2);
  EXPECT_EQ(call({"--format", "xml", "front", "--grid", kScenarios + "/toy_grid.csv"}).code, 2);
  EXPECT_EQ(call({"simulate", "--scenario", kScenarios + "/cfar.json", "--trials", "0"}).code, 2);
  EXPECT_EQ(call({"verify", "--inject-fault", "nope"}).code, 2);
  EXPECT_EQ(call({"--help"}).code, 0);
}
