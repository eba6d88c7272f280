#include "qkg/goodness.hpp"

#include "qkg/constants.hpp"
#include "qkg/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace qkg {

Polynomial::Polynomial(int s, std::vector<Term> terms) : s_(s) {
  if (s < 1) throw std::invalid_argument("polynomial needs s >= 1 variables");
  std::map<std::vector<int>, double> merged;
  for (auto& [e, c] : terms) {
    if (static_cast<int>(e.size()) != s) throw std::invalid_argument("exponent vector length must equal s");
    for (int v : e)
      if (v < 0) throw std::invalid_argument("negative exponent");
    merged[e] += c;
  }
  for (auto& [e, c] : merged)
    if (c != 0.0) terms_.emplace_back(e, c);
}

Polynomial Polynomial::affine(double c0, std::vector<double> c) {
  const int s = static_cast<int>(c.size());
  std::vector<Term> terms;
  terms.emplace_back(std::vector<int>(s, 0), c0);
  for (int i = 0; i < s; ++i) {
    std::vector<int> e(s, 0);
    e[i] = 1;
    terms.emplace_back(e, c[i]);
  }
  return Polynomial(s, std::move(terms));
}

Polynomial Polynomial::univariate(std::vector<double> coeffs) {
  std::vector<Term> terms;
  for (std::size_t k = 0; k < coeffs.size(); ++k) terms.emplace_back(std::vector<int>{static_cast<int>(k)}, coeffs[k]);
  return Polynomial(1, std::move(terms));
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) {
    int sum = 0;
    for (int v : e) sum += v;
    d = std::max(d, sum);
  }
  return d;
}

double Polynomial::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != s_) throw std::invalid_argument("point dimension mismatch");
  double acc = 0.0;
  for (const auto& [e, c] : terms_) {
    double t = c;
    for (int i = 0; i < s_; ++i)
      for (int k = 0; k < e[i]; ++k) t *= x[i];
    acc += t;
  }
  return acc;
}

double Polynomial::constant_term() const {
  for (const auto& [e, c] : terms_)
    if (std::all_of(e.begin(), e.end(), [](int v) { return v == 0; })) return c;
  return 0.0;
}

std::vector<double> Polynomial::linear_part() const {
  std::vector<double> g(s_, 0.0);
  for (const auto& [e, c] : terms_) {
    int sum = 0;
    int at = -1;
    for (int i = 0; i < s_; ++i) {
      sum += e[i];
      if (e[i] == 1) at = i;
    }
    if (sum == 1) g[at] += c;
  }
  return g;
}

std::vector<double> Polynomial::univariate_coeffs() const {
  if (s_ != 1) throw std::logic_error("univariate_coeffs needs s = 1");
  std::vector<double> out(degree() + 1, 0.0);
  for (const auto& [e, c] : terms_) out[e[0]] += c;
  return out;
}

Polynomial Polynomial::scaled(double lambda) const {
  std::vector<Term> terms = terms_;
  for (auto& t : terms) t.second *= lambda;
  return Polynomial(s_, std::move(terms));
}

namespace {

std::optional<double> polynomial_sup(const Polynomial& p, const Ball& b) {
  if (p.is_affine()) {
    const auto g = p.linear_part();
    double lin = p.constant_term();
    double n2 = 0.0;
    for (int i = 0; i < p.dim(); ++i) {
      lin += g[i] * b.center[i];
      n2 += g[i] * g[i];
    }
    return std::abs(lin) + b.radius * std::sqrt(n2);
  }
  if (p.dim() == 1 && p.degree() <= 3) {
    const auto c = p.univariate_coeffs();
    const double lo = b.center[0] - b.radius;
    const double hi = b.center[0] + b.radius;
    std::vector<double> pts{lo, hi};
    // derivative: c1 + 2 c2 x + 3 c3 x^2
    const double a = 3.0 * (c.size() > 3 ? c[3] : 0.0);
    const double bb = 2.0 * (c.size() > 2 ? c[2] : 0.0);
    const double cc = c.size() > 1 ? c[1] : 0.0;
    if (a == 0.0) {
      if (bb != 0.0) pts.push_back(-cc / bb);
    } else {
      const double disc = bb * bb - 4 * a * cc;
      if (disc >= 0) {
        const double sq = std::sqrt(disc);
        pts.push_back((-bb - sq) / (2 * a));
        pts.push_back((-bb + sq) / (2 * a));
      }
    }
    double best = 0.0;
    for (double x : pts)
      if (x >= lo && x <= hi) best = std::max(best, std::abs(p(std::span<const double>(&x, 1))));
    return best;
  }
  return std::nullopt;
}

bool closed_contains(const Ball& b, std::span<const double> x) {
  double d2 = 0;
  for (int i = 0; i < b.dim(); ++i) d2 += (x[i] - b.center[i]) * (x[i] - b.center[i]);
  return d2 <= b.radius * b.radius * (1 + 1e-14);
}

// Visits per_axis^s cell centres and (per_axis+1)^s corners of the bounding cube.
template <class Centre, class Corner>
void walk_grid(const Ball& b, int m, Centre&& centre, Corner&& corner) {
  const int s = b.dim();
  const double h = 2.0 * b.radius / m;
  std::vector<int> idx(s, 0);
  std::vector<double> x(s);
  for (;;) {
    for (int i = 0; i < s; ++i) x[i] = b.center[i] - b.radius + (idx[i] + 0.5) * h;
    centre(idx, std::span<const double>(x));
    int k = 0;
    while (k < s && ++idx[k] == m) idx[k++] = 0;
    if (k == s) break;
  }
  std::fill(idx.begin(), idx.end(), 0);
  for (;;) {
    for (int i = 0; i < s; ++i) x[i] = b.center[i] - b.radius + idx[i] * h;
    corner(idx, std::span<const double>(x));
    int k = 0;
    while (k < s && ++idx[k] == m + 1) idx[k++] = 0;
    if (k == s) break;
  }
}

}  // namespace

GoodFunction GoodFunction::from_polynomial(Polynomial p) {
  GoodFunction f;
  f.dim = p.dim();
  f.label = "polynomial of degree " + std::to_string(p.degree());
  f.poly = p;
  f.eval = [p](std::span<const double> x) { return p(x); };
  f.exact_sup = [p](const Ball& b) { return polynomial_sup(p, b); };
  return f;
}

int default_per_axis(int s) { return per_axis_for(s, 1e6, 401); }

SupEstimate sup_on_ball(const GoodFunction& f, const Ball& b, int per_axis) {
  if (f.dim != b.dim()) throw std::invalid_argument("function and ball dimensions differ");
  if (f.exact_sup)
    if (auto v = f.exact_sup(b)) return {*v, true, 0.0};
  const int m = per_axis > 0 ? per_axis : default_per_axis(b.dim());
  SupEstimate est;
  est.cell = 2.0 * b.radius / m;
  auto visit = [&](const std::vector<int>&, std::span<const double> x) {
    if (closed_contains(b, x)) est.value = std::max(est.value, std::abs(f.eval(x)));
  };
  walk_grid(b, m, visit, visit);
  return est;
}

SublevelEstimate sublevel_measure(const GoodFunction& f, const Ball& b, double eps, int per_axis) {
  if (!(eps > 0)) throw std::invalid_argument("epsilon must be positive");
  const int s = b.dim();
  const int m = per_axis > 0 ? per_axis : default_per_axis(s);
  SublevelEstimate est;
  est.per_axis = m;
  est.cell = 2.0 * b.radius / m;
  const double vol = std::pow(est.cell, s);

  std::vector<std::size_t> stride(s, 1);
  for (int i = 1; i < s; ++i) stride[i] = stride[i - 1] * (m + 1);
  std::vector<char> corner_in(stride.back() * (m + 1), 0);
  std::vector<char> centre_in(static_cast<std::size_t>(std::pow(m, s)), 0);
  std::vector<std::size_t> cstride(s, 1);
  for (int i = 1; i < s; ++i) cstride[i] = cstride[i - 1] * m;

  walk_grid(
      b, m,
      [&](const std::vector<int>& idx, std::span<const double> x) {
        std::size_t at = 0;
        for (int i = 0; i < s; ++i) at += idx[i] * cstride[i];
        centre_in[at] = (s == 1 || b.contains(x)) && std::abs(f.eval(x)) < eps;
      },
      [&](const std::vector<int>& idx, std::span<const double> x) {
        std::size_t at = 0;
        for (int i = 0; i < s; ++i) at += idx[i] * stride[i];
        corner_in[at] = closed_contains(b, x) && std::abs(f.eval(x)) < eps;
      });

  std::size_t count = 0;
  std::size_t ambiguous = 0;
  std::vector<int> idx(s, 0);
  for (std::size_t c = 0; c < centre_in.size(); ++c) {
    std::size_t rem = c;
    std::size_t base = 0;
    for (int i = 0; i < s; ++i) {
      idx[i] = static_cast<int>(rem % m);
      rem /= m;
      base += idx[i] * stride[i];
    }
    const bool in = centre_in[c];
    count += in;
    bool mixed = false;
    for (std::size_t mask = 0; mask < (std::size_t{1} << s) && !mixed; ++mask) {
      std::size_t at = base;
      for (int i = 0; i < s; ++i)
        if (mask >> i & 1) at += stride[i];
      mixed = corner_in[at] != in;
    }
    ambiguous += mixed;
  }
  est.measure = count * vol;
  est.error_bound = ambiguous * vol;
  return est;
}

GoodCheckReport check_good(const GoodFunction& f, double c, double alpha, const Ball& b,
                           std::span<const double> epsilons, const GoodCheckOptions& opt) {
  if (!(c > 0) || !(alpha > 0)) throw std::invalid_argument("C and alpha must be positive");
  GoodCheckReport rep;
  const int m = opt.per_axis > 0 ? opt.per_axis : default_per_axis(b.dim());
  const SupEstimate sup = sup_on_ball(f, b, m);
  if (sup.value == 0.0) {
    rep.zero_function = true;
    rep.verdict = "skipped";
    return rep;
  }
  const double vol = b.volume();
  bool any_fail = false;
  bool any_unresolved = false;
  for (double eps : epsilons) {
    GoodCheckSample smp;
    smp.ball = b;
    smp.epsilon = eps;
    smp.sup = sup.value;
    smp.sup_exact = sup.exact;
    smp.ball_measure = vol;
    const SublevelEstimate lvl = sublevel_measure(f, b, eps, m);
    smp.measured = std::min(lvl.measure, vol);
    smp.error_bound = lvl.error_bound;
    smp.rhs = c * std::pow(eps / sup.value, alpha) * vol;
    smp.resolution_ok = lvl.error_bound <= opt.error_budget * vol;
    smp.passed = smp.measured - smp.error_bound <= smp.rhs;
    rep.worst_ratio = std::max(rep.worst_ratio, (smp.measured - smp.error_bound) / smp.rhs);
    any_fail = any_fail || !smp.passed;
    any_unresolved = any_unresolved || (!smp.resolution_ok && smp.passed);
    rep.samples.push_back(smp);
  }
  rep.verdict = any_fail ? "fail" : any_unresolved ? "inconclusive" : "pass";
  return rep;
}

PropertySuiteReport property_suite(std::uint64_t seed, int cases) {
  PropertySuiteReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_real_distribution<double> rad(0.1, 2.0);
  std::uniform_real_distribution<double> frac(0.01, 1.0);
  const GoodPair lin = good_constant(1, 1);

  auto random_case = [&](Polynomial& p, Ball& b, std::vector<double>& eps) {
    p = Polynomial::affine(coef(rng), {coef(rng)});
    b = Ball({coef(rng)}, rad(rng));
    const double sup = *polynomial_sup(p, b);
    eps = {frac(rng) * sup, frac(rng) * sup, 1.5 * sup};
  };

  rep.g1 = rep.g4 = rep.g3 = true;
  for (int k = 0; k < cases; ++k) {
    Polynomial p = Polynomial::affine(0, {1});
    Ball b({0.0}, 1.0);
    std::vector<double> eps;
    random_case(p, b, eps);
    const auto f = GoodFunction::from_polynomial(p);
    const auto base = check_good(f, lin.c, lin.alpha, b, eps);

    // G1: lambda f against lambda eps reproduces every sample.
    std::vector<double> eps7;
    for (double e : eps) eps7.push_back(7 * e);
    const auto scaled = check_good(GoodFunction::from_polynomial(p.scaled(7)), lin.c, lin.alpha, b, eps7);
    for (std::size_t i = 0; i < eps.size(); ++i)
      if (std::abs(base.samples[i].measured - scaled.samples[i].measured) > 1e-12 * b.volume() ||
          base.samples[i].passed != scaled.samples[i].passed)
        rep.g1 = false;
    if (base.verdict != scaled.verdict) rep.g1 = false;

    // G4: a looser pair never turns pass into fail.
    if (base.verdict == "pass" && check_good(f, 2 * lin.c, lin.alpha / 2, b, eps).verdict != "pass") rep.g4 = false;

    // G3: g = f h with 1/2 <= h <= 1, so 1 <= |f|/|g| <= 2.
    GoodFunction g;
    g.dim = 1;
    g.eval = [p](std::span<const double> x) { return p(x) * (0.75 + 0.25 * std::cos(3 * x[0])); };
    g.label = "sandwiched";
    if (check_good(g, lin.c * std::pow(2.0, lin.alpha), lin.alpha, b, eps).verdict == "fail") rep.g3 = false;
  }

  // G2: max(|x|, |1-x|) on B(0, 2) with the linear constants.
  GoodFunction m;
  m.dim = 1;
  m.eval = [](std::span<const double> x) { return std::max(std::abs(x[0]), std::abs(1 - x[0])); };
  m.label = "max(|x|,|1-x|)";
  const Ball b2({0.0}, 2.0);
  const std::vector<double> eps2{0.25, 0.5, 1.0, 2.0, 3.0};
  rep.g2 = check_good(m, lin.c, lin.alpha, b2, eps2).verdict == "pass";
  if (!rep.g1) rep.notes.push_back("G1 scaling mismatch");
  if (!rep.g2) rep.notes.push_back("G2 failed on max(|x|,|1-x|)");
  if (!rep.g3) rep.notes.push_back("G3 sandwiched function failed");
  if (!rep.g4) rep.notes.push_back("G4 monotonicity failed");
  return rep;
}

}  // namespace qkg
