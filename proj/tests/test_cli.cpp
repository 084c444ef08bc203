#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "crtower/cli.hpp"
#include "crtower/tower.hpp"
#include "json.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "crtower");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = crtower::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string g15(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

}  // namespace

TEST(Cli, TowerJson) {
  const auto r = call({"tower", "--mu", "2.5", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["nodes"].size(), 2u);
  EXPECT_EQ(j["nodes"][0]["kind"], "Zero");
}

TEST(Cli, TowerJsonRoundTrip) {
  const auto r = call({"tower", "--mu", "3.83"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  const crtower::Tower t = crtower::build_tower(3.83);
  ASSERT_EQ(j["nodes"].size(), t.nodes.size());
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const auto& n = j["nodes"][i];
    EXPECT_EQ(g15(n["rho"].get<double>()), g15(t.nodes[i].rho));
    if (t.nodes[i].p1) {
      EXPECT_EQ(g15(n["p1"].get<double>()), g15(*t.nodes[i].p1));
    }
    EXPECT_EQ(n["period"].get<int>(), t.nodes[i].period);
  }
  EXPECT_FALSE(j["truncated"].get<bool>());
}

TEST(Cli, TowerDot) {
  const auto r = call({"tower", "--mu", "3.5", "--format", "dot", "--max-depth", "64"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("digraph", 0), 0u);
}

TEST(Cli, Window) {
  const auto r = call({"window", "--period", "3", "--bracket", "3.7:3.9"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["mu_birth"].get<double>(), 1 + 2 * std::sqrt(2.0), 1e-7);
  EXPECT_NEAR(j["mu_end"].get<double>(), 3.8568, 2e-3);
}

TEST(Cli, OracleCompare) {
  const auto r = call({"oracle", "--mu", "3.5", "--grid", "4000", "--eps", "5e-4", "--compare"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "4 components, order total, match: pass\n");
}

TEST(Cli, OracleCircle) {
  const auto r = call({"oracle", "--circle", "--grid", "2000", "--eps", "0.01"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("1 components", 0), 0u);
}

TEST(Cli, SweepWritesFiles) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto ppm = (dir / "crtower_cli_test.ppm").string();
  const auto csv = (dir / "crtower_cli_test.csv").string();
  const auto r = call({"sweep", "--mu-lo", "3.82", "--mu-hi", "3.86", "--columns", "32", "--height", "64", "--out",
                       ppm, "--csv", csv});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(csv);
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header, "mu,x,level,kind");
  EXPECT_EQ(std::filesystem::file_size(ppm), std::string("P6\n32 64\n255\n").size() + 32u * 64u * 3u);
  std::filesystem::remove(ppm);
  std::filesystem::remove(csv);
}

TEST(Cli, RepeatedRunsAgree) {
  EXPECT_EQ(call({"tower", "--mu", "3.63"}).out, call({"tower", "--mu", "3.63"}).out);
}

TEST(Cli, InputErrorsExitOne) {
  EXPECT_EQ(call({}).code, 1);
  EXPECT_EQ(call({"tower"}).code, 1);
  EXPECT_EQ(call({"tower", "--mu", "5"}).code, 1);
  EXPECT_EQ(call({"tower", "--mu", "3.2", "--bogus"}).code, 1);
  EXPECT_EQ(call({"tower", "--mu", "3.2", "--format", "xml"}).code, 1);
  EXPECT_EQ(call({"window", "--bracket", "3.9"}).code, 1);
  EXPECT_EQ(call({"window", "--bracket", "3.9:3.7"}).code, 1);
  EXPECT_EQ(call({"oracle", "--grid", "4000"}).code, 1);
  const auto r = call({"frobnicate"});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(r.out.empty());
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, ComputationFailureExitsTwo) {
  const auto r = call({"window", "--period", "3", "--bracket", "3.0:3.1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(r.out.empty());
}
