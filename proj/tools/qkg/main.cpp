#include <qkg_cli/commands.hpp>
#include <qkg_cli/config.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string override_constants;
  std::optional<int> grid;
  std::optional<long long> qmax;
  std::optional<long long> height;
  std::optional<int> tmax;
};

void add_flags(CLI::App& sub, Flags& f) {
  sub.add_option("--config", f.config, "JSON configuration file")->check(CLI::ExistingFile);
  sub.add_option("--seed", f.seed, "RNG seed (Monte Carlo sampling)");
  sub.add_option("--out", f.out, "output directory");
  sub.add_option("--override-constants", f.override_constants, "JSON file of constant overrides")
      ->check(CLI::ExistingFile);
  sub.add_option("--grid", f.grid, "total grid points over U")->check(CLI::PositiveNumber);
  sub.add_option("--qmax", f.qmax, "largest ||q|| in the bad-set search")->check(CLI::PositiveNumber);
  sub.add_option("--height", f.height, "multivector height for the exponent search")->check(CLI::PositiveNumber);
  sub.add_option("--tmax", f.tmax, "largest flow time")->check(CLI::NonNegativeNumber);
}

qkg::cli::RunConfig build_config(const Flags& f) {
  using namespace qkg::cli;
  RunConfig cfg = f.config.empty() ? parse_config(json::object()) : load_config(f.config);
  if (!f.override_constants.empty()) {
    std::ifstream in(f.override_constants);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("/", std::string("malformed override file: ") + e.what());
    }
    apply_overrides(cfg, doc);
  }
  if (f.seed) cfg.seed = *f.seed;
  if (!f.out.empty()) cfg.out = f.out;
  if (f.grid) cfg.bounds.grid = *f.grid;
  if (f.qmax) cfg.bounds.q_max = *f.qmax;
  if (f.height) cfg.bounds.height = *f.height;
  if (f.tmax) cfg.bounds.t_max = *f.tmax;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantitative Khintchine-Groshev experiments on affine subspaces"};
  app.require_subcommand(1);
  Flags flags;
  const std::map<std::string, std::string> about{
      {"exponents", "omega_j estimates and the exponent condition"},
      {"constants", "constant chain with provenance"},
      {"good-check", "(C, alpha)-goodness of a polynomial on a ball"},
      {"flow-trace", "flow parameters and A_t / A~_t membership along t"},
      {"km-check", "KM1 goodness of nu and KM2 lower bounds over primitive subgroups"},
      {"nondiv", "nondivergence sweep over eps''"},
      {"bad-set", "grid measure of the kappa-bad set up to Q"},
      {"main-theorem", "full pipeline: bad fraction plus tail bounds against xi"},
  };
  for (const auto& name : qkg::cli::subcommands()) add_flags(*app.add_subcommand(name, about.at(name)), flags);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qkg::cli::kExitConfig;
  }
  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    const auto cfg = build_config(flags);
    return qkg::cli::run(sub, cfg, std::cerr);
  } catch (const qkg::cli::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return qkg::cli::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qkg::cli::kExitError;
  }
}
