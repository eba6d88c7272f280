#include <qkg_cli/config.hpp>
#include <qkg_cli/io.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qkg;
using namespace qkg::cli;

namespace {

std::string pointer_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.pointer();
  }
  return "<accepted>";
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, DefaultsAreDesk) {
  const auto cfg = parse_config(json::object());
  EXPECT_EQ(cfg.s, 1);
  EXPECT_EQ(cfg.n, 2);
  EXPECT_EQ(cfg.a0, (std::vector<std::string>{"sqrt2-1"}));
  EXPECT_EQ(cfg.aprime, (std::vector<std::vector<std::string>>{{"sqrt3-1"}}));
  EXPECT_DOUBLE_EQ(cfg.radius, 0.5);
  EXPECT_DOUBLE_EQ(cfg.xi, 0.5);
  EXPECT_EQ(cfg.bounds.q_max, 64);
  EXPECT_EQ(cfg.bounds.t_max, 8);
  const auto h = cfg.subspace();
  EXPECT_NEAR(h.a(0, 0).approx(), std::sqrt(2.0) - 1, 1e-15);
  EXPECT_DOUBLE_EQ(cfg.ball().volume(), 1.0);
}

TEST(Config, ErrorsPointAtTheField) {
  EXPECT_EQ(pointer_of(json::parse(R"({"subspace": {"s": 1, "n": 2, "a0": ["abc"], "aprime": [["1/2"]]}})")), "/subspace/a0/0");
  EXPECT_EQ(pointer_of(json::parse(R"({"ball": {"radius": -1}})")), "/ball/radius");
  EXPECT_EQ(pointer_of(json::parse(R"({"xi": 1.5})")), "/xi");
  EXPECT_EQ(pointer_of(json::parse(R"({"bounds": {"q_max": 0}})")), "/bounds/q_max");
  EXPECT_EQ(pointer_of(json::parse(R"({"bounds": {"q_max": "ten"}})")), "/bounds/q_max");
  EXPECT_EQ(pointer_of(json::parse(R"({"psi": {"form": "power", "c": 2}})")), "/psi");
  EXPECT_EQ(pointer_of(json::parse(R"({"frobnicate": 1})")), "/frobnicate");
  EXPECT_EQ(pointer_of(json::parse(R"({"flow": {"ts": [0, -2]}})")), "/flow/ts/1");
}

TEST(Config, ShapeMismatchIsRejected) {
  const auto doc = json::parse(R"({"subspace": {"s": 1, "n": 3, "a0": ["1/2"], "aprime": [["1/3"]]}})");
  const auto p = pointer_of(doc);
  EXPECT_EQ(p.rfind("/subspace", 0), 0u) << p;
}

TEST(Config, RoundTrip) {
  const auto doc = json::parse(R"({
    "subspace": {"s": 1, "n": 2, "a0": ["1/3"], "aprime": [["2/5"]]},
    "ball": {"center": [0.1], "radius": 0.25},
    "psi": {"form": "powerLog", "c": 0.5, "exponent": 2},
    "xi": 0.25,
    "kappa": 1e-6,
    "bounds": {"q_max": 16, "grid": 500},
    "seed": 9,
    "overrides": {"theta": 1.2}
  })");
  const auto a = parse_config(doc);
  const auto b = parse_config(a.to_json());
  EXPECT_EQ(a.to_json(), b.to_json());
  EXPECT_EQ(b.psi.form, "powerLog");
  EXPECT_EQ(b.kappa, 1e-6);
  EXPECT_EQ(b.seed, 9u);
  EXPECT_DOUBLE_EQ(b.overrides.at("theta"), 1.2);
}

TEST(Config, Overrides) {
  auto cfg = parse_config(json::object());
  apply_overrides(cfg, json::parse(R"({"K2": 0.4, "besicovitch": {"1": 3}})"));
  EXPECT_DOUBLE_EQ(cfg.overrides.at("K2"), 0.4);
  EXPECT_DOUBLE_EQ(cfg.besicovitch_table().at(1), 3.0);
  EXPECT_THROW(apply_overrides(cfg, json::parse(R"({"K99": 1})")), ConfigError);
}

TEST(Io, CsvQuoting) {
  CsvTable t({"a", "b"});
  t.add({"1", "x,y"});
  t.add({"say \"hi\"", "plain"});
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.str(), "a,b\n1,\"x,y\"\n\"say \"\"hi\"\"\",plain\n");
}

TEST(Io, Sha256) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Io, FmtRoundTrips) {
  for (double v : {0.1, 1.0 / 3, 1e-300, 64.0, -2.5}) EXPECT_EQ(std::stod(fmt(v)), v);
}

TEST(Io, AtomicWriteReplaces) {
  const auto dir = std::filesystem::temp_directory_path() / "qkg_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "report.json";
  write_atomic(path, "first");
  write_atomic(path, "second");
  EXPECT_EQ(slurp(path), "second");
  write_json(path, json{{"k", 1}});
  EXPECT_EQ(json::parse(slurp(path)), (json{{"k", 1}}));
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  EXPECT_EQ(files, 1u);
  std::filesystem::remove_all(dir);
}

TEST(Io, Timestamp) {
  const auto ts = utc_timestamp();
  EXPECT_EQ(ts.size(), 20u);
  EXPECT_EQ(ts.back(), 'Z');
}
