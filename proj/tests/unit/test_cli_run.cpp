#include <gtest/gtest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kBinary = QKG_BINARY;
const fs::path kSource = QKG_SOURCE_DIR;

int run(const std::string& args) {
  const std::string cmd = kBinary + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("qkg_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

double constant(const json& report, const std::string& name) {
  for (const auto& v : report.at("values"))
    if (v.at("name") == name) return v.at("value").get<double>();
  throw std::out_of_range(name);
}

}  // namespace

TEST(CliRun, ConstantsOnDesk) {
  const auto out = scratch("constants");
  ASSERT_EQ(run("constants --config " + (kSource / "configs/desk.json").string() + " --out " + out.string()), 0);
  const auto rep = json::parse(slurp(out / "constants.json"));
  EXPECT_DOUBLE_EQ(constant(rep, "K_s"), 64.0);
  EXPECT_DOUBLE_EQ(constant(rep, "N_s"), 2.0);
  EXPECT_EQ(rep.at("condition_verdict"), "pass");
}

TEST(CliRun, InvalidConfigExitsTwo) {
  const auto out = scratch("invalid");
  const auto cfg = out / "bad.json";
  std::ofstream(cfg) << R"({"subspace": {"s": 1, "n": 2, "a0": ["abc"], "aprime": [["1/2"]]}})";
  EXPECT_EQ(run("constants --config " + cfg.string() + " --out " + out.string()), 2);
  std::ofstream(cfg) << R"({"ball": {"radius": -1}})";
  EXPECT_EQ(run("constants --config " + cfg.string() + " --out " + out.string()), 2);
  EXPECT_EQ(run("constants --qmax 0 --out " + out.string()), 2);
  EXPECT_EQ(run("no-such-command"), 2);
}

TEST(CliRun, RationalMainTheoremExitsThree) {
  const auto out = scratch("rational");
  EXPECT_EQ(run("main-theorem --config " + (kSource / "configs/rational.json").string() + " --out " + out.string()),
            3);
}

TEST(CliRun, ReportsAreReproducible) {
  const auto a = scratch("repro_a");
  const auto b = scratch("repro_b");
  const std::string common = "bad-set --qmax 8 --grid 300 --seed 4 --out ";
  ASSERT_EQ(run(common + a.string()), 0);
  ASSERT_EQ(run(common + b.string()), 0);
  EXPECT_EQ(slurp(a / "bad_set.json"), slurp(b / "bad_set.json"));
  EXPECT_EQ(slurp(a / "bad_set_per_q.csv"), slurp(b / "bad_set_per_q.csv"));
  const auto ma = json::parse(slurp(a / "manifest.json"));
  const auto mb = json::parse(slurp(b / "manifest.json"));
  EXPECT_EQ(ma.at("config_hash"), mb.at("config_hash"));
}

TEST(CliRun, ManifestFields) {
  const auto out = scratch("manifest");
  ASSERT_EQ(run("exponents --config " + (kSource / "configs/desk.json").string() + " --out " + out.string()), 0);
  const auto m = json::parse(slurp(out / "manifest.json"));
  for (const char* key : {"subcommand", "config_hash", "config", "seed", "versions", "timestamps", "constants",
                          "verdicts", "artifacts", "exit_code"})
    EXPECT_TRUE(m.contains(key)) << key;
  EXPECT_EQ(m.at("subcommand"), "exponents");
  EXPECT_EQ(m.at("config_hash").get<std::string>().size(), 64u);
  EXPECT_EQ(m.at("exit_code"), 0);
  EXPECT_TRUE(m.at("timestamps").contains("started"));
  EXPECT_TRUE(fs::exists(out / "exponents.json"));
  EXPECT_TRUE(fs::exists(out / "exponents_per_j.csv"));
}

TEST(CliRun, GoodCheckPasses) {
  const auto out = scratch("good");
  ASSERT_EQ(
      run("good-check --config " + (kSource / "configs/good_quadratic.json").string() + " --out " + out.string()), 0);
  const auto rep = json::parse(slurp(out / "good_check.json"));
  EXPECT_EQ(rep.at("verdict"), "pass");
}
