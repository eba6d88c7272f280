#pragma once

#include "qkg/subspace.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qkg {

// Real polynomial in s variables, stored as (exponent vector, coefficient).
class Polynomial {
 public:
  using Term = std::pair<std::vector<int>, double>;

  Polynomial(int s, std::vector<Term> terms);
  static Polynomial affine(double c0, std::vector<double> c);
  // Coefficients of 1, x, x^2, ... in one variable.
  static Polynomial univariate(std::vector<double> coeffs);

  int dim() const { return s_; }
  int degree() const;
  bool is_affine() const { return degree() <= 1; }
  double operator()(std::span<const double> x) const;
  const std::vector<Term>& terms() const { return terms_; }

  // For degree <= 1: constant and gradient.
  double constant_term() const;
  std::vector<double> linear_part() const;
  // For s = 1: dense coefficient list.
  std::vector<double> univariate_coeffs() const;

  Polynomial scaled(double lambda) const;

 private:
  int s_;
  std::vector<Term> terms_;
};

// A function on R^s with optional structure used for exact sup evaluation.
struct GoodFunction {
  int dim = 1;
  std::function<double(std::span<const double>)> eval;
  std::optional<Polynomial> poly;
  // Exact sup of |f| on a ball, when known in closed form.
  std::function<std::optional<double>(const Ball&)> exact_sup;
  std::string label;

  static GoodFunction from_polynomial(Polynomial p);
};

struct SupEstimate {
  double value = 0.0;
  bool exact = false;
  double cell = 0.0;  // grid spacing when not exact
};

// Affine: |c0 + c.x0| + r||c||_2. s = 1 polynomials up to degree 3: endpoints
// and critical points. Otherwise the grid maximum (an under-estimate).
SupEstimate sup_on_ball(const GoodFunction& f, const Ball& b, int per_axis);

struct SublevelEstimate {
  double measure = 0.0;
  double error_bound = 0.0;  // measure of grid cells whose corners disagree
  double cell = 0.0;
  int per_axis = 0;
};

// |{x in B : |f(x)| < eps}| by cell-centre counting on a per_axis^s grid.
SublevelEstimate sublevel_measure(const GoodFunction& f, const Ball& b, double eps, int per_axis);

struct GoodCheckSample {
  Ball ball;
  double epsilon = 0.0;
  double measured = 0.0;
  double error_bound = 0.0;
  double sup = 0.0;
  bool sup_exact = false;
  double rhs = 0.0;
  double ball_measure = 0.0;
  bool passed = false;
  bool resolution_ok = true;
};

struct GoodCheckReport {
  std::vector<GoodCheckSample> samples;
  std::string verdict;  // pass | fail | inconclusive | skipped
  double worst_ratio = 0.0;  // max (measured - error) / rhs
  bool zero_function = false;
};

struct GoodCheckOptions {
  int per_axis = 0;             // 0: 10^6^(1/s) capped at 401
  double error_budget = 0.05;   // grid error allowed, as a fraction of |B|
};

int default_per_axis(int s);

// Checks |{|f| < eps} cap B| <= C (eps / sup_B |f|)^alpha |B| for every eps.
// A sample passes when measured - error_bound <= rhs; it is inconclusive when
// the grid error bound exceeds the budget.
GoodCheckReport check_good(const GoodFunction& f, double c, double alpha, const Ball& b,
                           std::span<const double> epsilons, const GoodCheckOptions& opt = {});

struct PropertySuiteReport {
  bool g1 = false;  // scaling
  bool g2 = false;  // sup of good functions
  bool g3 = false;  // sandwiched functions
  bool g4 = false;  // monotonicity in (C, alpha)
  std::vector<std::string> notes;
  bool all() const { return g1 && g2 && g3 && g4; }
};

PropertySuiteReport property_suite(std::uint64_t seed, int cases = 50);

}  // namespace qkg
