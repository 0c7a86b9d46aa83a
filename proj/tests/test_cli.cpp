#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fspace/cli.hpp"
#include "fspace/differences.hpp"
#include "fspace/grid.hpp"

using namespace fspace;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "fspace_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

const std::string kCorpus = R"({"seed":4,"count":6,"kind":"sign-oscillating","level":8,"zero_mean":true})";

}  // namespace

TEST(Cli, ClassifyExample) {
  const auto r = call({"classify", "--space", "B:0.75:2:2:1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("perfect"), "yes");
  bool found = false;
  for (const auto& c : j.at("citations")) found = found || (c.at("slot") == "perfect" && c.at("tag") == "Thm3.12(ii)");
  EXPECT_TRUE(found);
  EXPECT_EQ(j.at("config").at("version"), cli::version_string());
}

TEST(Cli, ClassifyWithScaler) {
  const auto r = call({"classify", "--space", "B:1.2:2:2:1", "--scaler", R"({"kind":"sinusoidal","a":1,"b":0.5})"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("strong"), "yes");
  EXPECT_EQ(j.at("requires_g_prime_seminorm"), true);
  const auto bad = call({"classify", "--space", "B:0.9:2:2:1", "--scaler", R"({"kind":"table","nodes":[-1,0,1],"values":[1,0,1]})"});
  ASSERT_EQ(bad.code, 0);
  EXPECT_TRUE(nlohmann::json::parse(bad.out).at("citations").empty());
}

TEST(Cli, CounterexampleCsv) {
  const auto r = call({"counterexample", "haar-scaling", "--space", "B:0.5:2:2:1", "--jmax", "6"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "j,norm_f,norm_abs,ratio");
  int j = 0;
  while (std::getline(in, line)) {
    const double ratio = std::stod(line.substr(line.rfind(',') + 1));
    EXPECT_NEAR(ratio, std::exp2(0.5 * j), 1e-12 * std::exp2(0.5 * j));
    ++j;
  }
  EXPECT_EQ(j, 7);
}

TEST(Cli, NormOfZeroFunction) {
  const auto path = scratch("zero.json");
  std::ofstream(path) << to_json(sample([](double) { return 0.0; }, 6, 0, 1, "zero"));
  const auto r = call({"norm", "--kind", "osc-b", "--space", "B:0.5:2:2:1", "--input", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("value"), 0.0);
  EXPECT_TRUE(j.at("advisory").is_array());
  // s = 1/2 is outside the window 1/p < s < 1.
  EXPECT_EQ(j.at("advisory").at(0), "outside-window");
  const auto mismatch = call({"norm", "--kind", "osc-b", "--space", "B:0.5:2:2:2", "--input", path.string()});
  EXPECT_EQ(mismatch.code, 2);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(call({"classify", "--space", "B:0.75:2:2:1", "--bogus"}).code, 2);
  EXPECT_EQ(call({"classify", "--space", "X:0.75:2:2:1"}).code, 2);
  EXPECT_EQ(call({}).code, 2);
  EXPECT_EQ(call({"--help"}).code, 0);
  const auto bad = scratch("bad.json");
  std::ofstream(bad) << "{not json";
  EXPECT_EQ(call({"norm", "--kind", "osc-b", "--space", "B:0.5:2:2:1", "--input", bad.string()}).code, 2);
  EXPECT_EQ(call({"norm", "--kind", "osc-b", "--space", "B:0.5:2:2:1", "--input", "/nonexistent.json"}).code, 2);
  const auto r = call({"experiment", "fubini", "--space", "B:0.75:2:3:2", "--corpus", kCorpus});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("Prop2.5(ii)"), std::string::npos);
}

TEST(Cli, ExperimentDeterministicAcrossThreads) {
  const std::vector<std::string> base{"experiment", "trunc", "--space", "B:0.75:2:2:1", "--corpus", kCorpus,
                                      "--norm-kind", "osc-b"};
  auto one = base, three = base;
  one.insert(one.end(), {"--threads", "1"});
  three.insert(three.end(), {"--threads", "3"});
  const auto a = call(one), b = call(three), c = call(one);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
  const auto j = nlohmann::json::parse(a.out);
  EXPECT_EQ(j.at("config").at("corpus").at("seed"), 4);
  EXPECT_EQ(j.at("config").at("level"), 8);
  EXPECT_EQ(j.at("config").at("norm_kind"), "osc-B");
}

TEST(Cli, ComposeAndFubiniExperiments) {
  const auto comp = call({"experiment", "compose", "--space", "B:0.75:2:2:1", "--corpus", kCorpus, "--scaler",
                          R"({"kind":"sinusoidal","a":1,"b":0.5})"});
  ASSERT_EQ(comp.code, 0) << comp.err;
  EXPECT_EQ(nlohmann::json::parse(comp.out).at("extra").at("bracket_sandwich").at("upper_violations"), 0);
  EXPECT_EQ(call({"experiment", "compose", "--space", "B:0.75:2:2:1", "--corpus", kCorpus}).code, 2);
  const auto fub = call({"experiment", "fubini", "--space", "B:0.75:2:2:2", "--corpus",
                         R"({"seed":2,"count":4,"kind":"piecewise-linear-random-knots","level":6,"dim":2,"tensor":true})"});
  ASSERT_EQ(fub.code, 0) << fub.err;
  EXPECT_EQ(nlohmann::json::parse(fub.out).at("count"), 4);
}

TEST(Cli, CorpusGenerateThenExperiment) {
  const auto spec = scratch("spec.json");
  std::ofstream(spec) << kCorpus;
  const auto dir = scratch("corpus");
  fs::remove_all(dir);
  const auto g = call({"corpus", "generate", "--spec", spec.string(), "--out", dir.string()});
  ASSERT_EQ(g.code, 0) << g.err;
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir / "f0005.json"));
  const auto from_dir = call({"experiment", "trunc", "--space", "B:0.75:2:2:1", "--corpus", dir.string()});
  const auto from_spec = call({"experiment", "trunc", "--space", "B:0.75:2:2:1", "--corpus", spec.string()});
  ASSERT_EQ(from_dir.code, 0) << from_dir.err;
  const auto a = nlohmann::json::parse(from_dir.out), b = nlohmann::json::parse(from_spec.out);
  EXPECT_EQ(a.at("rows"), b.at("rows"));
}

TEST(Cli, DiagnoseMembership) {
  const auto bounded = call({"diagnose", "membership", "--target", "chiQ", "--space", "B:0.5:2:inf:1", "--level", "10"});
  ASSERT_EQ(bounded.code, 0) << bounded.err;
  EXPECT_EQ(nlohmann::json::parse(bounded.out).at("verdict"), diff::to_string(diff::Verdict::Bounded));
  const auto growth = call({"diagnose", "membership", "--target", "hat", "--space", "B:1.5:2:1:1"});
  ASSERT_EQ(growth.code, 0) << growth.err;
  EXPECT_EQ(nlohmann::json::parse(growth.out).at("verdict"), diff::to_string(diff::Verdict::PowerGrowth));
  EXPECT_EQ(call({"diagnose", "membership", "--target", "file", "--space", "B:0.5:2:2:1"}).code, 2);
}
