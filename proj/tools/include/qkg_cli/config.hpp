#pragma once

#include <qkg/approx.hpp>
#include <qkg/constants.hpp>
#include <qkg/goodness.hpp>
#include <qkg/subspace.hpp>

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qkg::cli {

using json = nlohmann::json;

// Invalid configuration; `pointer` is a JSON pointer to the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string pointer, const std::string& what)
      : std::runtime_error(pointer + ": " + what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

struct PsiSpec {
  std::string form = "power";  // power | powerLog | table
  double c = 1.0;
  double exponent = 2.0;
  std::vector<std::pair<double, double>> points;
};

struct SearchBounds {
  long long q_max = 64;          // bad set, large-gradient budget
  long long exponent_q = 1000;   // omega search
  long long height = 20;         // multivector height for omega_j
  std::uint64_t cap = 50'000'000;
  int grid = 10000;              // total grid points over U
  int t_max = 8;
  long long km_height = 10;      // primitive subgroup height for KM2
  long long km1_height = 1;
  int km_grid = 201;             // per axis
  std::string sampling = "grid";  // grid | monte_carlo
};

struct GoodSpec {
  int s = 1;
  std::vector<Polynomial::Term> terms;
  std::vector<double> center;
  double radius = 1.0;
  std::vector<double> epsilons;
  std::optional<double> c;
  std::optional<double> alpha;
  int per_axis = 0;
};

struct RunConfig {
  int s = 1;
  int n = 2;
  std::vector<std::string> a0;
  std::vector<std::vector<std::string>> aprime;
  unsigned precision = 60;
  std::vector<double> center;
  double radius = 0.5;
  PsiSpec psi;
  double xi = 0.5;
  std::optional<double> kappa;
  SearchBounds bounds;
  std::vector<int> ts{0, 2, 4, 6, 8};
  std::vector<double> eps2_fractions{0.5, 0.25, 0.125, 0.0625};
  std::vector<double> flow_x;
  std::optional<GoodSpec> good;
  std::map<std::string, double> overrides;
  std::map<int, double> besicovitch;
  std::uint64_t seed = 0;
  std::string out = "qkg-out";

  // Builds the subspace; sets the working precision first.
  AffineSubspace subspace() const;
  Ball ball() const;
  PsiFunction psi_function() const;
  BesicovitchTable besicovitch_table() const;
  json to_json() const;
};

// Parses and validates a configuration document. Missing sections take the
// desk defaults (s = 1, n = 2, A = (sqrt2 - 1; sqrt3 - 1), U = B(0, 1/2)).
RunConfig parse_config(const json& doc);
RunConfig load_config(const std::string& path);

// Merges {"name": value, ..., "besicovitch": {"s": N_s}} into the config.
void apply_overrides(RunConfig& cfg, const json& doc);

}  // namespace qkg::cli
