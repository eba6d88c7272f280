#pragma once

#include "qkg/constants.hpp"
#include "qkg/exponents.hpp"
#include "qkg/flow.hpp"
#include "qkg/sampling.hpp"
#include "qkg/subspace.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qkg {

// Non-increasing psi on [1, inf) with psi(x) <= 1/x, checked at construction.
class PsiFunction {
 public:
  enum class Form { power, power_log, table };

  // c x^{-a}; needs 0 < c <= 1 and a >= 1.
  static PsiFunction power(double c, double a);
  // c / (x (1 + ln x)^b); needs 0 < c <= 1 and b >= 0.
  static PsiFunction power_log(double c, double b);
  // Linear interpolation through (x_i, v_i), x_0 = 1, zero beyond the last x.
  static PsiFunction table(std::vector<std::pair<double, double>> points);

  Form form() const { return form_; }
  double operator()(double x) const;
  bool convergent() const;
  // Integral of psi over [z, inf), z >= 1.
  double tail_integral(double z) const;
  // Last x with psi(x) > 0 for tables.
  std::optional<double> support_end() const;
  std::string describe() const;

 private:
  Form form_ = Form::power;
  double c_ = 1.0;
  double e_ = 2.0;  // a or b
  std::vector<std::pair<double, double>> table_;
};

class DivergentSeries : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Certified bracket for a convergent series.
struct SeriesBracket {
  double lower = 0.0;
  double upper = 0.0;
  long long terms = 0;  // partial sum length
  bool exact = false;   // finite support: lower == upper

  double mid() const { return 0.5 * (lower + upper); }
};

// sum_{k>=1} psi(k) within tol: [S_N + int_{N+1}, S_N + int_N].
SeriesBracket sum_psi_scalar(const PsiFunction& psi, double tol = 1e-9);
// sum over q in Z^n \ 0 of psi(||q||_inf^n), by sup-norm shells; the tail
// past N lies between 2 (2 - 3/(N+1))^{n-1} int_{(N+1)^n}^inf psi and
// 2 (2 + 3/N)^{n-1} int_{N^n}^inf psi.
SeriesBracket sum_psi_lattice(const PsiFunction& psi, int n, double tol = 1e-9);
// Exact shell partial sum over 1 <= ||q||_inf <= q_max.
double lattice_partial_sum(const PsiFunction& psi, int n, long long q_max);

// min_p |p + (x, x~A) q| >= kappa psi(||q||_inf^n).
bool kappa1_holds(const AffineSubspace& h, std::span<const double> x, std::span<const long long> q,
                  const PsiFunction& psi, double kappa);

enum class GradientClass { small, large };
// small iff ||[I A'] q||_inf < sqrt(ns ||q||_inf) / (2r).
GradientClass classify_q(const AffineSubspace& h, const Ball& u, std::span<const long long> q);

// |L(q)| = |{x in U : dist((x, x~A) q, Z) < delta'}| in closed form: a slab
// family across the ball, integrated against the ball's cross-section.
double measure_L(const AffineSubspace& h, const Ball& u, std::span<const long long> q, double delta_prime);

// One of each +-q with 1 <= ||q||_inf <= Q.
std::vector<std::vector<long long>> q_representatives(int n, long long q_max);

struct LargeRow {
  std::vector<long long> q;
  double measure = 0.0;  // |L(q)|; L(-q) is the same set
  double bound = 0.0;    // K_s kappa psi(||q||^n) |U|
};

struct LargeReport {
  long long q_max = 0;
  std::size_t large_count = 0;
  double total = 0.0;        // sum over q and -q of |L_large(q)|
  double total_bound = 0.0;  // K_s kappa Sigma_psi |U|
  double budget = 0.0;       // (xi/2) |U|
  std::size_t per_q_violations = 0;
  double worst_per_q_ratio = 0.0;
  std::vector<LargeRow> rows;
  bool ok = false;
};

LargeReport measure_L_large_total(const AffineSubspace& h, const Ball& u, const PsiFunction& psi, double kappa,
                                  long long q_max, double ks, double sum_psi_upper, double xi);

struct BadSetRow {
  std::vector<long long> q;
  GradientClass cls = GradientClass::small;
  double measure = 0.0;  // |L(q)|
  std::size_t grid_hits = 0;
};

// Constants needed for the q > Q tail bounds.
struct TailInputs {
  double ks = 0.0;
  double sum_psi_upper = 0.0;
  double k0 = 0.0;
  double beta = 0.0;
};

struct BadSetReport {
  double kappa = 0.0;
  long long q_max = 0;
  std::string grid;
  std::size_t points = 0;
  std::size_t excluded_exact_hits = 0;
  std::size_t bad = 0;
  std::size_t bad_small = 0;  // in some L_small(q)
  std::size_t bad_large = 0;  // in some L_large(q)
  double fraction_bad = 0.0;
  double ci_low = 0.0;        // Wilson 95%
  double ci_high = 0.0;
  double union_bound = 0.0;   // sum_q |L(q)| / |U|
  bool tails_computed = false;
  double large_tail = 0.0;    // fraction of |U|
  double small_tail = 0.0;
  int t_q = 0;
  std::vector<BadSetRow> per_q;
};

BadSetReport measure_bad_set(const AffineSubspace& h, const Ball& u, const PsiFunction& psi, double kappa,
                             long long q_max, const SamplePoints& pts, std::optional<TailInputs> tails = {});

std::pair<double, double> wilson_interval(std::size_t hits, std::size_t n, double z = 1.959963984540054);

struct MainTheoremBounds {
  long long q_max = 64;
  long long exponent_q = 1000;
  MultivectorSearch search{};
  int grid = 10000;
  int t_max = 8;
  bool measure_at = false;
  double sum_tolerance = 1e-9;
};

struct MainTheoremReport {
  ExponentConditionReport condition;
  ConstantsReport constants;
  SeriesBracket sum_psi;
  double kappa = 0.0;
  double kappa_half_xi = 0.0;
  LargeReport large;
  BadSetReport bad;
  std::vector<ATildeMeasurement> a_tilde;
  double xi = 0.0;
  double small_empirical = 0.0;  // fraction in some L_small(q), ||q|| <= Q
  double large_empirical = 0.0;
  double total = 0.0;            // fraction_bad + tails
  bool large_ok = false;
  bool small_ok = false;
  bool a_tilde_ok = false;
  std::string verdict;
};

class PreconditionFailure : public std::runtime_error {
 public:
  explicit PreconditionFailure(ExponentConditionReport report);
  const ExponentConditionReport& report() const { return report_; }

 private:
  ExponentConditionReport report_;
};

struct MainTheoremRequest {
  const AffineSubspace* h = nullptr;
  Ball u;
  PsiFunction psi = PsiFunction::power(1.0, 2.0);
  double xi = 0.5;
  MainTheoremBounds bounds;
  BesicovitchTable besicovitch;
  std::map<std::string, double> overrides;
};

// Condition check, constants, large-gradient budget, bad set and A~_t
// measurements. Throws PreconditionFailure when the exponent condition does
// not pass.
MainTheoremReport main_theorem_experiment(const MainTheoremRequest& req);

}  // namespace qkg
