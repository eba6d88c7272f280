#include "qkg/approx.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qkg {

namespace {

long long sup_abs(std::span<const long long> q) {
  long long m = 0;
  for (long long v : q) m = std::max(m, v < 0 ? -v : v);
  return m;
}

// Neumaier-compensated long double accumulator.
struct Accumulator {
  long double sum = 0;
  long double comp = 0;
  void add(long double v) {
    const long double t = sum + v;
    comp += std::fabs(sum) >= std::fabs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const { return static_cast<double>(sum + comp); }
};

}  // namespace

PsiFunction PsiFunction::power(double c, double a) {
  if (!(c > 0 && c <= 1)) throw std::invalid_argument("power psi needs 0 < c <= 1 (psi(x) <= 1/x at x = 1)");
  if (!(a >= 1)) throw std::invalid_argument("power psi needs a >= 1 (psi(x) <= 1/x for large x)");
  PsiFunction p;
  p.form_ = Form::power;
  p.c_ = c;
  p.e_ = a;
  return p;
}

PsiFunction PsiFunction::power_log(double c, double b) {
  if (!(c > 0 && c <= 1)) throw std::invalid_argument("powerLog psi needs 0 < c <= 1");
  if (!(b >= 0)) throw std::invalid_argument("powerLog psi needs b >= 0");
  PsiFunction p;
  p.form_ = Form::power_log;
  p.c_ = c;
  p.e_ = b;
  return p;
}

PsiFunction PsiFunction::table(std::vector<std::pair<double, double>> points) {
  if (points.empty() || points.front().first != 1.0) throw std::invalid_argument("psi table must start at x = 1");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [x, v] = points[i];
    if (!(v >= 0) || !std::isfinite(v)) throw std::invalid_argument("psi table values must be finite and >= 0");
    if (i > 0) {
      if (!(x > points[i - 1].first)) throw std::invalid_argument("psi table abscissae must increase");
      if (v > points[i - 1].second) throw std::invalid_argument("psi table must be non-increasing");
    }
  }
  // x l(x) is quadratic on each segment: check the endpoints and the vertex.
  auto violates = [](double x, double v) { return x * v > 1.0 + 1e-12; };
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (violates(points[i].first, points[i].second))
      throw std::invalid_argument("psi table violates psi(x) <= 1/x");
    if (i + 1 < points.size()) {
      const auto [x0, v0] = points[i];
      const auto [x1, v1] = points[i + 1];
      const double m = (v1 - v0) / (x1 - x0);
      if (m < 0) {
        const double xv = (m * x0 - v0) / (2 * m);
        if (xv > x0 && xv < x1 && violates(xv, v0 + m * (xv - x0)))
          throw std::invalid_argument("psi table interpolant violates psi(x) <= 1/x");
      }
    }
  }
  PsiFunction p;
  p.form_ = Form::table;
  p.table_ = std::move(points);
  return p;
}

double PsiFunction::operator()(double x) const {
  switch (form_) {
    case Form::power:
      return c_ * std::pow(x, -e_);
    case Form::power_log:
      return c_ / (x * std::pow(1.0 + std::log(x), e_));
    case Form::table: {
      if (x <= table_.front().first) return table_.front().second;
      if (x > table_.back().first) return 0.0;
      auto it = std::upper_bound(table_.begin(), table_.end(), x,
                                 [](double v, const std::pair<double, double>& p) { return v < p.first; });
      if (it == table_.end()) return table_.back().second;
      const auto [x1, v1] = *it;
      const auto [x0, v0] = *(it - 1);
      return v0 + (v1 - v0) * (x - x0) / (x1 - x0);
    }
  }
  return 0.0;
}

bool PsiFunction::convergent() const {
  switch (form_) {
    case Form::power: return e_ > 1;
    case Form::power_log: return e_ > 1;
    case Form::table: return true;
  }
  return false;
}

double PsiFunction::tail_integral(double z) const {
  if (!convergent()) return std::numeric_limits<double>::infinity();
  switch (form_) {
    case Form::power:
      return c_ * std::pow(z, 1.0 - e_) / (e_ - 1.0);
    case Form::power_log:
      return c_ * std::pow(1.0 + std::log(z), 1.0 - e_) / (e_ - 1.0);
    case Form::table: {
      double acc = 0.0;
      for (std::size_t i = 0; i + 1 < table_.size(); ++i) {
        const double a = std::max(z, table_[i].first);
        const double b = table_[i + 1].first;
        if (b <= a) continue;
        acc += 0.5 * ((*this)(a) + (*this)(b)) * (b - a);
      }
      return acc;
    }
  }
  return 0.0;
}

std::optional<double> PsiFunction::support_end() const {
  if (form_ != Form::table) return std::nullopt;
  return table_.back().first;
}

std::string PsiFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (form_) {
    case Form::power: os << "power: " << c_ << " * x^-" << e_; break;
    case Form::power_log: os << "powerLog: " << c_ << " / (x (1 + ln x)^" << e_ << ")"; break;
    case Form::table: os << "table: " << table_.size() << " points on [1, " << table_.back().first << "]"; break;
  }
  return os.str();
}

SeriesBracket sum_psi_scalar(const PsiFunction& psi, double tol) {
  if (!psi.convergent()) throw DivergentSeries("sum of psi(k) diverges for " + psi.describe());
  SeriesBracket out;
  Accumulator acc;
  if (auto end = psi.support_end()) {
    const long long last = static_cast<long long>(std::floor(*end));
    for (long long k = 1; k <= last; ++k) acc.add(psi(static_cast<double>(k)));
    out.lower = out.upper = acc.value();
    out.terms = last;
    out.exact = true;
    return out;
  }
  const long long cap = 100'000'000;
  long long n = 1;
  while (n < cap && psi(static_cast<double>(n)) > tol) n = std::min(cap, n * 2);
  // Tighten to the first N with psi(N) <= tol.
  long long lo = std::max(1LL, n / 2);
  while (lo < n) {
    const long long mid = lo + (n - lo) / 2;
    if (psi(static_cast<double>(mid)) <= tol)
      n = mid;
    else
      lo = mid + 1;
  }
  for (long long k = n; k >= 1; --k) acc.add(psi(static_cast<double>(k)));
  const double s = acc.value();
  out.terms = n;
  out.lower = s + psi.tail_integral(static_cast<double>(n + 1));
  out.upper = s + psi.tail_integral(static_cast<double>(n));
  return out;
}

namespace {
double shell(int n, long long k) {
  return std::pow(2.0 * k + 1, n) - std::pow(2.0 * k - 1, n);
}
}  // namespace

double lattice_partial_sum(const PsiFunction& psi, int n, long long q_max) {
  Accumulator acc;
  for (long long k = q_max; k >= 1; --k) acc.add(shell(n, k) * psi(std::pow(static_cast<double>(k), n)));
  return acc.value();
}

SeriesBracket sum_psi_lattice(const PsiFunction& psi, int n, double tol) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!psi.convergent()) throw DivergentSeries("lattice sum of psi(||q||^n) diverges for " + psi.describe());
  SeriesBracket out;
  if (auto end = psi.support_end()) {
    const long long last = static_cast<long long>(std::floor(std::pow(*end, 1.0 / n))) + 1;
    out.lower = out.upper = lattice_partial_sum(psi, n, last);
    out.terms = last;
    out.exact = true;
    return out;
  }
  // Shell sizes lie between 2n(2k-1)^{n-1} and 2n(2k+1)^{n-1}; comparing
  // the shell sum beyond N with the integral of psi(y^n) gives both tails.
  auto upper_tail = [&](long long nn) {
    const double d = static_cast<double>(nn);
    return 2.0 * std::pow(2.0 + 3.0 / d, n - 1) * psi.tail_integral(std::pow(d, n));
  };
  auto lower_tail = [&](long long nn) {
    const double d = static_cast<double>(nn + 1);
    return 2.0 * std::pow(std::max(0.0, 2.0 - 3.0 / d), n - 1) * psi.tail_integral(std::pow(d, n));
  };
  const long long cap = 100'000'000;
  long long nn = 16;
  while (nn < cap && upper_tail(nn) - lower_tail(nn) > tol) nn = std::min(cap, nn * 2);
  out.terms = nn;
  const double partial = lattice_partial_sum(psi, n, nn);
  out.lower = partial + lower_tail(nn);
  out.upper = partial + upper_tail(nn);
  return out;
}

bool kappa1_holds(const AffineSubspace& h, std::span<const double> x, std::span<const long long> q,
                  const PsiFunction& psi, double kappa) {
  if (sup_abs(q) == 0) throw std::invalid_argument("q must be nonzero");
  const Residual r = h.form_at(x).nearest(q);
  const double rhs = kappa * psi(std::pow(static_cast<double>(sup_abs(q)), h.n()));
  if (r.zero) return rhs <= 0.0;
  return std::abs(r.value) >= rhs;
}

GradientClass classify_q(const AffineSubspace& h, const Ball& u, std::span<const long long> q) {
  const long long qn = sup_abs(q);
  if (qn == 0) throw std::invalid_argument("q must be nonzero");
  double g = 0.0;
  for (int i = 0; i < h.s(); ++i) {
    double v = static_cast<double>(q[i]);
    for (int l = 0; l < h.codim(); ++l) v += h.a(i + 1, l).approx() * static_cast<double>(q[h.s() + l]);
    g = std::max(g, std::abs(v));
  }
  const double threshold = std::sqrt(static_cast<double>(h.n()) * h.s() * static_cast<double>(qn)) / (2.0 * u.radius);
  return g < threshold ? GradientClass::small : GradientClass::large;
}

double measure_L(const AffineSubspace& h, const Ball& u, std::span<const long long> q, double delta_prime) {
  const int s = h.s();
  if (!(delta_prime > 0)) return 0.0;
  // phi(x) = c + g.x with c = a0.q_tail and g = [I A'] q.
  Real c(0);
  for (int l = 0; l < h.codim(); ++l) c += h.a(0, l).value() * q[s + l];
  std::vector<Real> g(s);
  Real phi0 = c;
  Real gn2(0);
  for (int i = 0; i < s; ++i) {
    g[i] = Real(q[i]);
    for (int l = 0; l < h.codim(); ++l) g[i] += h.a(i + 1, l).value() * q[s + l];
    phi0 += g[i] * Real(u.center[i]);
    gn2 += g[i] * g[i];
  }
  const Real r(u.radius);
  if (gn2 == 0) {
    const Real d = boost::multiprecision::abs(phi0 - boost::multiprecision::round(phi0));
    return d < Real(delta_prime) ? u.volume() : 0.0;
  }
  const Real gn = boost::multiprecision::sqrt(gn2);
  const double w = delta_prime / to_double(gn);
  const double rd = u.radius;
  // Cross-section of the ball at signed distance tau along g.
  const double vs1 = unit_ball_volume(s - 1);
  auto density = [&](double tau) {
    const double v = rd * rd - tau * tau;
    return v <= 0 ? 0.0 : vs1 * std::pow(v, (s - 1) / 2.0);
  };
  auto integrate = [&](double centre, double half) {
    if (s == 1) return 2.0 * half;
    // Composite 5-point Gauss-Legendre on [centre - half, centre + half].
    static const double xs[5] = {0.0, 0.5384693101056831, -0.5384693101056831, 0.9061798459386640, -0.9061798459386640};
    static const double ws[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                                 0.2369268850561891};
    const int pieces = half > 1e-3 * rd ? 32 : 1;
    const double h2 = half / pieces;
    double acc = 0.0;
    for (int k = 0; k < pieces; ++k) {
      const double mid = centre - half + (2 * k + 1) * h2;
      for (int j = 0; j < 5; ++j) acc += ws[j] * density(mid + xs[j] * h2);
    }
    return acc * h2;
  };

  const Real reach = gn * r + Real(delta_prime);
  const long long pmin = static_cast<long long>(boost::multiprecision::floor(phi0 - reach));
  const long long pmax = static_cast<long long>(boost::multiprecision::ceil(phi0 + reach));
  double total = 0.0;
  for (long long p = pmin; p <= pmax; ++p) {
    const Real cp = (Real(p) - phi0) / gn;
    const Real lo = cp - Real(w);
    const Real hi = cp + Real(w);
    if (hi <= -r || lo >= r) continue;
    if (lo >= -r && hi <= r) {
      total += integrate(to_double(cp), w);
    } else {
      const Real a = std::max(lo, Real(-r));
      const Real b = std::min(hi, r);
      if (b > a) total += integrate(to_double((a + b) / 2), to_double((b - a) / 2));
    }
  }
  return std::min(total, u.volume());
}

std::vector<std::vector<long long>> q_representatives(int n, long long q_max) {
  std::vector<std::vector<long long>> out;
  std::vector<long long> q(n, -q_max);
  for (;;) {
    int f = 0;
    while (f < n && q[f] == 0) ++f;
    if (f < n && q[f] > 0) out.push_back(q);
    int k = 0;
    while (k < n && ++q[k] > q_max) q[k++] = -q_max;
    if (k == n) break;
  }
  return out;
}

LargeReport measure_L_large_total(const AffineSubspace& h, const Ball& u, const PsiFunction& psi, double kappa,
                                  long long q_max, double ks, double sum_psi_upper, double xi) {
  LargeReport rep;
  rep.q_max = q_max;
  const double vol = u.volume();
  for (const auto& q : q_representatives(h.n(), q_max)) {
    if (classify_q(h, u, q) != GradientClass::large) continue;
    const double dp = kappa * psi(std::pow(static_cast<double>(sup_abs(q)), h.n()));
    LargeRow row{q, measure_L(h, u, q, dp), ks * dp * vol};
    ++rep.large_count;
    rep.total += 2.0 * row.measure;
    if (row.bound > 0) rep.worst_per_q_ratio = std::max(rep.worst_per_q_ratio, row.measure / row.bound);
    if (row.measure > row.bound * (1 + 1e-12)) ++rep.per_q_violations;
    rep.rows.push_back(std::move(row));
  }
  rep.large_count *= 2;
  rep.total_bound = ks * kappa * sum_psi_upper * vol;
  rep.budget = 0.5 * xi * vol;
  rep.ok = rep.per_q_violations == 0 && rep.total <= rep.total_bound * (1 + 1e-12) && rep.total <= rep.budget;
  return rep;
}

std::pair<double, double> wilson_interval(std::size_t hits, std::size_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
  return {hits == 0 ? 0.0 : std::max(0.0, centre - half), hits == n ? 1.0 : std::min(1.0, centre + half)};
}

BadSetReport measure_bad_set(const AffineSubspace& h, const Ball& u, const PsiFunction& psi, double kappa,
                             long long q_max, const SamplePoints& pts, std::optional<TailInputs> tails) {
  if (q_max < 1) throw std::invalid_argument("Q must be >= 1");
  if (!(kappa >= 0)) throw std::invalid_argument("kappa must be >= 0");
  const int s = h.s();
  const int n = h.n();
  BadSetReport rep;
  rep.kappa = kappa;
  rep.q_max = q_max;
  rep.grid = pts.description;
  const double vol = u.volume();

  const auto reps = q_representatives(n, q_max);
  std::vector<double> dprime(reps.size());
  rep.per_q.reserve(reps.size());
  double union_sum = 0.0;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    dprime[i] = kappa * psi(std::pow(static_cast<double>(sup_abs(reps[i])), n));
    BadSetRow row;
    row.q = reps[i];
    row.cls = classify_q(h, u, reps[i]);
    row.measure = measure_L(h, u, reps[i], dprime[i]);
    union_sum += row.measure;
    rep.per_q.push_back(std::move(row));
  }
  rep.union_bound = std::min(1.0, union_sum / vol);

  std::size_t counted = 0;
  for (std::size_t idx = 0; idx < pts.size(); ++idx) {
    const LinearForm form = h.form_at(pts.point(idx));
    bool bad = false;
    bool small = false;
    bool large = false;
    bool hit = false;
    for (std::size_t i = 0; i < reps.size() && !hit; ++i) {
      const Residual r = form.nearest(reps[i]);
      if (r.zero) {
        hit = true;
        break;
      }
      if (std::abs(r.value) < dprime[i]) {
        bad = true;
        ++rep.per_q[i].grid_hits;
        (rep.per_q[i].cls == GradientClass::small ? small : large) = true;
      }
    }
    if (hit) {
      ++rep.excluded_exact_hits;
      continue;
    }
    ++counted;
    rep.bad += bad;
    rep.bad_small += small;
    rep.bad_large += large;
  }
  rep.points = counted;
  rep.fraction_bad = counted ? static_cast<double>(rep.bad) / static_cast<double>(counted) : 0.0;
  std::tie(rep.ci_low, rep.ci_high) = wilson_interval(rep.bad, counted);

  if (tails) {
    rep.tails_computed = true;
    const double rest = std::max(0.0, tails->sum_psi_upper - lattice_partial_sum(psi, n, q_max));
    rep.large_tail = tails->ks * kappa * rest;
    rep.t_q = static_cast<int>(std::floor(std::log2(static_cast<double>(q_max) + 1)));
    const double c = (1.0 / (2.0 * (n + 1)) - tails->beta) / s;
    rep.small_tail = tails->k0 * std::pow(kappa, 1.0 / (s * (n + 1.0))) * std::pow(2.0, -c * rep.t_q) /
                     (1.0 - std::pow(2.0, -c));
  }
  return rep;
}

namespace {
std::string refusal_message(const ExponentConditionReport& r) {
  std::ostringstream os;
  os << "exponent condition verdict '" << r.verdict << "': " << r.explanation;
  return os.str();
}
}  // namespace

PreconditionFailure::PreconditionFailure(ExponentConditionReport report)
    : std::runtime_error(refusal_message(report)), report_(std::move(report)) {}

MainTheoremReport main_theorem_experiment(const MainTheoremRequest& req) {
  if (!req.h) throw std::invalid_argument("main theorem needs a subspace");
  const AffineSubspace& h = *req.h;
  const int s = h.s();
  const int n = h.n();
  if (req.u.dim() != s) throw std::invalid_argument("ball dimension must equal s");
  if (!(req.xi > 0 && req.xi < 1)) throw std::invalid_argument("xi must lie in (0, 1)");

  MainTheoremReport rep;
  rep.xi = req.xi;
  rep.condition = check_condition(h, req.bounds.exponent_q, req.bounds.search);
  if (rep.condition.verdict != "pass") throw PreconditionFailure(rep.condition);

  rep.sum_psi = sum_psi_lattice(req.psi, n, req.bounds.sum_tolerance);
  ConstantsRequest creq;
  creq.s = s;
  creq.n = n;
  creq.u = req.u;
  creq.xi = req.xi;
  creq.sum_psi = rep.sum_psi.upper;
  creq.empirical = {rep.condition.empirical_theta, rep.condition.empirical_k3, rep.condition.empirical_k4,
                    req.bounds.exponent_q, req.bounds.search.height};
  creq.besicovitch = req.besicovitch;
  creq.overrides = req.overrides;
  rep.constants = evaluate_constants(creq);
  const auto& k = rep.constants;
  rep.kappa = k["kappa"];
  rep.kappa_half_xi = kappa_for_xi(req.xi / 2, s, n, req.u.radius, k["K_s"], k["Sigma_psi"], k["K0"], k["K1"]);

  rep.large = measure_L_large_total(h, req.u, req.psi, rep.kappa, req.bounds.q_max, k["K_s"], rep.sum_psi.upper,
                                    req.xi);
  const SamplePoints pts = grid_points(req.u, per_axis_for(s, req.bounds.grid, 1 << 30));
  rep.bad = measure_bad_set(h, req.u, req.psi, rep.kappa, req.bounds.q_max, pts,
                            TailInputs{k["K_s"], rep.sum_psi.upper, k["K0"], k["beta"]});

  rep.a_tilde_ok = true;
  for (int t = 0; t <= req.bounds.t_max; ++t) {
    const FlowParameters p = FlowParameters::make(s, n, t, Real(rep.kappa), req.u.radius, k["beta"]);
    rep.a_tilde.push_back(measure_A_tilde(h, req.u, p, pts, k["K0"], req.bounds.measure_at));
    rep.a_tilde_ok = rep.a_tilde_ok && rep.a_tilde.back().ok && rep.a_tilde.back().inclusion_ok;
  }

  const double denom = rep.bad.points ? static_cast<double>(rep.bad.points) : 1.0;
  rep.small_empirical = rep.bad.bad_small / denom;
  rep.large_empirical = rep.bad.bad_large / denom;
  rep.total = rep.bad.fraction_bad + rep.bad.large_tail + rep.bad.small_tail;
  rep.large_ok = rep.large.ok;
  rep.small_ok = rep.small_empirical + rep.bad.small_tail < req.xi / 2;
  rep.verdict = rep.total <= req.xi && rep.large_ok && rep.small_ok && rep.a_tilde_ok ? "pass" : "fail";
  return rep;
}

}  // namespace qkg
