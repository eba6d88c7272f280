#pragma once

#include <qkg/flow.hpp>
#include <qkg/subspace.hpp>

#include <cmath>
#include <optional>
#include <vector>

#include "test_random.hpp"

namespace qkg::fixtures {

inline AffineSubspace desk_subspace() {
  return AffineSubspace(1, 2, {parse_entry("sqrt2-1")}, {{parse_entry("sqrt3-1")}});
}

inline AffineSubspace random_rational_subspace(Rng& rng, int s, int n) {
  std::vector<Entry> a0;
  for (int j = 0; j < n - s; ++j) a0.emplace_back(rng.rational(5, 7));
  std::vector<std::vector<Entry>> ap(s);
  for (auto& row : ap)
    for (int j = 0; j < n - s; ++j) row.emplace_back(rng.rational(5, 7));
  return AffineSubspace(s, n, a0, ap);
}

// A point x in u with |p + (x, x~A) q| < kappa/2^{nt}, 2^t <= ||q|| < 2^{t+1}
// and ||[I A'] q|| below the gradient bound, found by solving for one
// coordinate of x.
struct Planted {
  std::vector<double> x;
  long long p = 0;
  std::vector<long long> q;
  int t = 0;
};

inline std::optional<Planted> plant_at_witness(Rng& rng, const AffineSubspace& h, const Ball& u, int t,
                                               double kappa, int attempts = 2000) {
  const int s = h.s();
  const int n = h.n();
  const double delta = kappa / std::ldexp(1.0, n * t);
  const double kgrad = std::sqrt(n * s / (2.0 * u.radius * u.radius)) * std::pow(2.0, t / 2.0);
  const long long hi = (1LL << (t + 1)) - 1;
  for (int a = 0; a < attempts; ++a) {
    std::vector<long long> q(n);
    long long qn = 0;
    for (auto& v : q) {
      v = rng.integer(-hi, hi);
      qn = std::max(qn, v < 0 ? -v : v);
    }
    if (qn < (1LL << t)) continue;
    std::vector<double> g(s);
    int lead = 0;
    double gsup = 0.0;
    for (int i = 0; i < s; ++i) {
      g[i] = static_cast<double>(q[i]);
      for (int l = 0; l < h.codim(); ++l) g[i] += h.a(i + 1, l).approx() * static_cast<double>(q[s + l]);
      if (std::abs(g[i]) > std::abs(g[lead])) lead = i;
      gsup = std::max(gsup, std::abs(g[i]));
    }
    if (!(gsup < kgrad) || gsup == 0.0) continue;
    // Other coordinates near the centre, then the lead one solves phi(x) = -p + eta.
    std::vector<double> x(u.center);
    double rest = 0.0;
    for (int l = 0; l < h.codim(); ++l) rest += h.a(0, l).approx() * static_cast<double>(q[s + l]);
    for (int i = 0; i < s; ++i) {
      if (i == lead) continue;
      x[i] += rng.uniform(-0.3, 0.3) * u.radius / std::sqrt(static_cast<double>(s));
      rest += g[i] * x[i];
    }
    const double span = std::abs(g[lead]) * u.radius * 0.5;
    const double mid = rest + g[lead] * u.center[lead];
    const long long pmin = static_cast<long long>(std::ceil(-(mid + span)));
    const long long pmax = static_cast<long long>(std::floor(-(mid - span)));
    if (pmin > pmax) continue;
    const long long p = rng.integer(pmin, pmax);
    const double eta = rng.uniform(-0.5, 0.5) * delta;
    x[lead] = (static_cast<double>(-p) + eta - rest) / g[lead];
    if (!u.contains(x)) continue;
    const Residual r = h.form_at(x).nearest(q);
    if (r.nearest != -p || !(std::abs(r.value) < 0.9 * delta)) continue;
    return Planted{x, p, q, t};
  }
  return std::nullopt;
}

// ||H(x) lambda||_inf for lambda = (p, 0, q) at working precision.
inline Real orbit_norm(const AffineSubspace& h, const Planted& w, const FlowParameters& p) {
  const Matrix<Real> m = h_matrix(h, w.x, p);
  const int d = 1 + h.s() + h.n();
  std::vector<Real> lambda(d, Real(0));
  lambda[0] = w.p;
  for (int i = 0; i < h.n(); ++i) lambda[1 + h.s() + i] = w.q[i];
  Real best(0);
  for (int r = 0; r < d; ++r) {
    Real acc(0);
    for (int c = 0; c < d; ++c) acc += m(r, c) * lambda[c];
    best = std::max(best, Real(boost::multiprecision::abs(acc)));
  }
  return best;
}

}  // namespace qkg::fixtures
