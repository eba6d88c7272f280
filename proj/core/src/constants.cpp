#include "qkg/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qkg {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::exact: return "exact";
    case Provenance::table: return "table";
    case Provenance::empirical: return "empirical";
    case Provenance::override_value: return "override";
  }
  return "?";
}

BesicovitchTable::BesicovitchTable() {
  // s = 1: intervals. s = 2: Fueredi-Loeb. See docs/besicovitch.md.
  values_ = {{1, 2.0}, {2, 19.0}};
}

void BesicovitchTable::set(int s, double value) {
  if (s < 1 || !(value >= 1.0) || !std::isfinite(value))
    throw std::invalid_argument("Besicovitch override needs s >= 1 and a finite value >= 1");
  values_[s] = value;
  overridden_[s] = true;
}

double BesicovitchTable::at(int s) const {
  auto it = values_.find(s);
  if (it == values_.end())
    throw std::out_of_range("no Besicovitch constant for s = " + std::to_string(s) + "; supply an override");
  return it->second;
}

double k_s_constant(int s, double ns) {
  return std::pow(4.0, 2 * s + 1) * std::pow(static_cast<double>(s), s / 2.0) * ns / unit_ball_volume(s);
}

GoodPair good_constant(int s, int l) {
  if (s < 1 || l < 1) throw std::invalid_argument("good_constant needs s, l >= 1");
  const double c = std::pow(2.0, s + 1) * s * l * std::pow(l + 1.0, 1.0 / l) / unit_ball_volume(s);
  return {c, 1.0 / (s * l)};
}

GoodPair km1_constants(int s, int n) {
  if (s < 1 || n < 1) throw std::invalid_argument("km1_constants needs s, n >= 1");
  const double c = std::pow(2.0, s + 2 + (1.0 + s + n) / (2.0 * s)) * s / unit_ball_volume(s);
  return {std::max(c, 1.0), 1.0 / s};
}

namespace {

double k2_value(double c0, std::span<const double> c, const Ball& u) {
  double lin = c0;
  double norm2 = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    lin += c[i] * u.center[i];
    norm2 += c[i] * c[i];
  }
  return std::abs(lin) + u.radius * std::sqrt(norm2);
}

}  // namespace

double k2_constant(const Ball& u) {
  const int s = u.dim();
  if (s == 1) {
    const double x0 = u.center[0];
    std::vector<std::pair<double, double>> cand = {{1, 1}, {1, -1}, {1, 0}, {0, 1}};
    if (x0 != 0.0 && std::abs(1.0 / x0) <= 1.0) cand.emplace_back(1, -1.0 / x0);
    if (std::abs(x0) <= 1.0) cand.emplace_back(-x0, 1);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [c0, c1] : cand) best = std::min(best, k2_value(c0, std::span<const double>(&c1, 1), u));
    return best;
  }

  // Each face of the unit sup-sphere (one coordinate pinned at 1; the value
  // is even) is gridded; subtracting the Lipschitz drift over half a cell
  // keeps the result a lower bound.
  const int g = std::max(3, std::min(401, static_cast<int>(std::pow(1e6, 1.0 / s))));
  const double h = 2.0 / (g - 1);
  double l1 = 0.0;
  for (double v : u.center) l1 += std::abs(v);
  const double margin = 0.5 * h * (1.0 + l1 + u.radius * std::sqrt(static_cast<double>(s)));
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> full(s + 1);
  std::vector<int> idx(s, 0);
  for (int pinned = 0; pinned <= s; ++pinned) {
    std::fill(idx.begin(), idx.end(), 0);
    for (;;) {
      for (int k = 0, t = 0; k <= s; ++k) full[k] = (k == pinned) ? 1.0 : -1.0 + h * idx[t++];
      best = std::min(best, k2_value(full[0], std::span<const double>(full.data() + 1, s), u));
      int k = 0;
      while (k < s && ++idx[k] == g) idx[k++] = 0;
      if (k == s) break;
    }
  }
  return std::max(best - margin, 0.0);
}

double beta_choice(int n, double theta) {
  if (!(theta > 0)) throw std::domain_error("beta_choice needs theta > 0 (the admissible interval is empty at 0)");
  const double upper = 1.0 / (2.0 * (n + 1));
  const double lower = std::max(0.0, upper - theta / (n - theta + 1));
  return 0.5 * (lower + upper);
}

double flow_scale(int s, int n, double r) { return std::pow(2.0, n - 1.5) * std::sqrt(static_cast<double>(n) * s) / r; }

double k5_constant(double k2, double k4, double theta, int s, int n, double r) {
  if (!(k2 > 0) || !(k4 > 0)) throw std::domain_error("K5 needs positive K2 and K4");
  double best = std::numeric_limits<double>::infinity();
  const double e = n - theta + 1;
  for (int k = 1; k <= n - s; ++k) {
    const double term = std::pow(k2 * k4, k / e) * std::pow(flow_scale(s, n, r), k / (n + 1.0)) *
                        std::pow(2.0, (1.0 / e - 1.0) * k);
    best = std::min(best, term);
  }
  return best;
}

double rho_constant(double k2, double k3, double k5, int s, int n, double r) {
  const double mid = k2 * k3 * std::sqrt(static_cast<double>(n) * s) / (std::pow(2.0, n / 2.0 + 1) * r);
  const double low = k5 / std::pow(2.0, (n + 1) / 2.0);
  return std::min({0.5, mid, low});
}

namespace {
double k1_rate(int s, int n, double beta) {
  const double upper = 1.0 / (2.0 * (n + 1));
  if (!(beta < upper)) throw std::domain_error("K1 diverges for beta >= 1/(2(n+1))");
  if (!(beta > 0)) throw std::domain_error("beta must be positive");
  return (upper - beta) / s;
}
}  // namespace

double k1_constant(int s, int n, double beta) { return 1.0 / (1.0 - std::pow(2.0, -k1_rate(s, n, beta))); }

double k1_partial_sum(int s, int n, double beta, long long terms) {
  const double q = std::pow(2.0, -k1_rate(s, n, beta));
  double sum = 0.0;
  double term = 1.0;
  for (long long t = 0; t < terms; ++t) {
    sum += term;
    term *= q;
  }
  return sum;
}

double k0_constant(int s, int n, double r, double c, double rho, double ns) {
  return (n + 1) * std::pow(std::pow(3.0, s) * ns, n + 1) * c * std::pow(1.0 + s + n, 1.0 / (2 * s)) *
         std::pow(rho, -1.0 / s) * std::pow(flow_scale(s, n, r), 1.0 / (s * (n + 1.0)));
}

double kappa_for_xi(double xi, int s, int n, double r, double ks, double sum_psi, double k0, double k1) {
  if (!(xi > 0 && xi < 1)) throw std::domain_error("xi must lie in (0, 1)");
  const double m = std::min({1.0, xi / (2.0 * ks * sum_psi), 1.0 / flow_scale(s, n, r),
                             std::pow(xi / (2.0 * k0 * k1), s * (n + 1.0))});
  return m * (1.0 - 1e-6);
}

const ConstantValue& ConstantsReport::at(const std::string& name) const {
  for (const auto& [k, v] : values)
    if (k == name) return v;
  throw std::out_of_range("constant " + name + " not in report");
}

ConstantsReport evaluate_constants(const ConstantsRequest& req) {
  const int s = req.s;
  const int n = req.n;
  if (req.u.dim() != s) throw std::invalid_argument("ball dimension must equal s");
  const double r = req.u.radius;

  ConstantsReport rep;
  rep.s = s;
  rep.n = n;
  rep.r = r;
  rep.ball_center = req.u.center;
  rep.xi = req.xi;
  rep.q_bound = req.empirical.q_bound;
  rep.height = req.empirical.height;

  auto rank = [](Provenance p) {
    switch (p) {
      case Provenance::exact: return 0;
      case Provenance::table: return 1;
      case Provenance::override_value: return 2;
      case Provenance::empirical: return 3;
    }
    return 3;
  };
  auto get = [&](const std::string& name) -> const ConstantValue& { return rep.at(name); };
  auto weakest = [&](std::initializer_list<const char*> deps) {
    Provenance p = Provenance::exact;
    for (const char* d : deps)
      if (rank(get(d).provenance) > rank(p)) p = get(d).provenance;
    return p;
  };
  auto put = [&](const std::string& name, double value, Provenance p, std::string note = {}) {
    auto it = req.overrides.find(name);
    if (it != req.overrides.end()) {
      value = it->second;
      p = Provenance::override_value;
      note = "override";
    }
    if (!std::isfinite(value) || !(value > 0))
      throw std::domain_error("constant " + name + " evaluated to a non-positive or non-finite value");
    rep.values.emplace_back(name, ConstantValue{value, p, std::move(note)});
    return value;
  };

  const double vs = put("V_s", unit_ball_volume(s), Provenance::exact);
  const double ns = put("N_s", req.besicovitch.at(s),
                        req.besicovitch.overridden(s) ? Provenance::override_value : Provenance::table,
                        "upper bound from the Besicovitch table");
  (void)vs;
  const double ks = put("K_s", k_s_constant(s, ns), weakest({"N_s"}));
  const GoodPair km1 = km1_constants(s, n);
  const double c = put("C", km1.c, Provenance::exact);
  put("alpha", km1.alpha, Provenance::exact);
  const double k2 = put("K2", k2_constant(req.u), Provenance::exact,
                        s == 1 ? "exact breakpoint minimum" : "grid minimum minus Lipschitz margin");
  const std::string bounds =
      "search Q=" + std::to_string(req.empirical.q_bound) + ", height=" + std::to_string(req.empirical.height);
  const double k3 = put("K3", req.empirical.k3, Provenance::empirical, bounds);
  const double k4 = put("K4", req.empirical.k4, Provenance::empirical, bounds);
  const double theta = put("theta", req.empirical.theta, Provenance::empirical, bounds);
  const double beta = put("beta", beta_choice(n, theta), weakest({"theta"}), "midpoint of admissible interval");
  const double k5 = put("K5", k5_constant(k2, k4, theta, s, n, r), weakest({"K2", "K4", "theta"}));
  const double rho = put("rho", rho_constant(k2, k3, k5, s, n, r), weakest({"K2", "K3", "K5"}));
  const double k1 = put("K1", k1_constant(s, n, beta), weakest({"beta"}));
  const double k0 = put("K0", k0_constant(s, n, r, c, rho, ns), weakest({"C", "rho", "N_s"}));
  const double sum_psi = put("Sigma_psi", req.sum_psi, Provenance::exact, "upper end of certified bracket");
  put("kappa", kappa_for_xi(req.xi, s, n, r, ks, sum_psi, k0, k1),
      weakest({"K_s", "Sigma_psi", "K0", "K1"}), "includes the 1-1e-6 strictness factor");
  return rep;
}

}  // namespace qkg
