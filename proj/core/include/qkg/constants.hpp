#pragma once

#include "qkg/subspace.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qkg {

enum class Provenance { exact, table, empirical, override_value };

std::string to_string(Provenance p);

// Upper bounds for the Besicovitch covering constant N_s, by dimension.
class BesicovitchTable {
 public:
  BesicovitchTable();  // shipped values
  void set(int s, double value);
  // Throws std::out_of_range when s has no entry.
  double at(int s) const;
  bool contains(int s) const { return values_.count(s) > 0; }
  bool overridden(int s) const { return overridden_.count(s) > 0; }
  const std::map<int, double>& values() const { return values_; }

 private:
  std::map<int, double> values_;
  std::map<int, bool> overridden_;
};

struct GoodPair {
  double c = 0.0;
  double alpha = 0.0;
};

double k_s_constant(int s, double ns);
GoodPair good_constant(int s, int l);
GoodPair km1_constants(int s, int n);

// min over (c0, c) with sup-norm 1 of |c0 + c.x0| + r ||c||_2; exact
// breakpoint evaluation for s = 1, a certified grid lower bound otherwise.
double k2_constant(const Ball& u);

// Midpoint of [max(0, 1/(2(n+1)) - theta/(n-theta+1)), 1/(2(n+1))).
double beta_choice(int n, double theta);
double k5_constant(double k2, double k4, double theta, int s, int n, double r);
double rho_constant(double k2, double k3, double k5, int s, int n, double r);
double k1_constant(int s, int n, double beta);
// Partial sum of the K1 series up to t = terms-1.
double k1_partial_sum(int s, int n, double beta, long long terms);
double k0_constant(int s, int n, double r, double c, double rho, double ns);
double kappa_for_xi(double xi, int s, int n, double r, double ks, double sum_psi, double k0, double k1);

// 2^{n-3/2} sqrt(ns) / r, the recurring scale in the flow constants.
double flow_scale(int s, int n, double r);

struct ConstantValue {
  double value = 0.0;
  Provenance provenance = Provenance::exact;
  std::string note;
};

struct EmpiricalInputs {
  double theta = 0.0;
  double k3 = 1.0;
  double k4 = 0.0;
  long long q_bound = 0;
  long long height = 0;
};

struct ConstantsRequest {
  int s = 1;
  int n = 2;
  Ball u;
  double xi = 0.5;
  double sum_psi = 0.0;
  EmpiricalInputs empirical;
  BesicovitchTable besicovitch;
  // Replaces any named constant before dependants are evaluated
  // (N_s, K2, K3, K4, theta, beta).
  std::map<std::string, double> overrides;
};

struct ConstantsReport {
  int s = 0;
  int n = 0;
  double r = 0.0;
  std::vector<double> ball_center;
  double xi = 0.0;
  long long q_bound = 0;
  long long height = 0;
  std::string beta_rule = "midpoint";
  std::vector<std::pair<std::string, ConstantValue>> values;  // evaluation order

  const ConstantValue& at(const std::string& name) const;
  double operator[](const std::string& name) const { return at(name).value; }
};

ConstantsReport evaluate_constants(const ConstantsRequest& req);

}  // namespace qkg
