// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances and sizes are fixed here.

#include <qkg/approx.hpp>
#include <qkg/constants.hpp>
#include <qkg/exponents.hpp>
#include <qkg/exterior.hpp>
#include <qkg/flow.hpp>
#include <qkg/goodness.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "planting.hpp"
#include "test_random.hpp"

using namespace qkg;
using qkg::fixtures::Rng;

namespace {

constexpr int kExteriorCases = 10'000;
constexpr double kExteriorSeconds = 60;
constexpr int kOmegaRational = 100;
constexpr long long kOmegaQ = 1000;
constexpr long long kOmegaHeight = 20;
constexpr double kOmegaTolerance = 0.1;
constexpr double kGoldenLow = 0.95;
constexpr double kGoldenHigh = 1.05;
constexpr double kGoldenSeconds = 10;
constexpr int kGoodCases = 1000;
constexpr double kGoodBudget = 0.05;
constexpr double kBrokenC = 0.01;
constexpr int kFlowCases = 1000;
constexpr int kPlanted = 1000;
constexpr double kKm2Seconds = 600;
constexpr double kMainSeconds = 1800;
constexpr double kDirichletFloor = 0.99;
constexpr double kK1Tolerance = 1e-9;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  std::printf("%s [%d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(),
              seconds_since(t0));
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

template <class... Args>
std::string cat(const Args&... args) {
  std::ostringstream os;
  os.precision(6);
  (os << ... << args);
  return os.str();
}

// ---- 1: exterior algebra ----------------------------------------------------

using MV = Multivector<Rational>;

MV random_vector(Rng& rng, Frame f) {
  std::vector<Rational> c;
  for (int i = 0; i < f.dim(); ++i) c.push_back(rng.rational(6, 5));
  return MV::vector(f, c);
}

MV random_blade(Rng& rng, Frame f, int grade) {
  MV out = MV::scalar(f, Rational(1));
  for (int i = 0; i < grade; ++i) out = wedge(out, random_vector(rng, f));
  return out;
}

// Sum of two decomposable blades of the same grade.
MV random_homogeneous(Rng& rng, Frame f, int grade) {
  return random_blade(rng, f, grade) + rng.rational() * random_blade(rng, f, grade);
}

Frame random_frame(Rng& rng) {
  static const Frame frames[] = {Frame::ambient(1, 2), Frame::ambient(2, 3), Frame::ambient(1, 3),
                                 Frame::ambient(2, 2)};
  return frames[rng.integer(0, 3)];
}

Outcome exterior_suite() {
  Rng rng(101);
  const auto t0 = Clock::now();
  std::size_t anti = 0, bilin = 0, submult = 0, homog = 0, clin = 0;
  for (int i = 0; i < kExteriorCases; ++i) {
    const Frame f = random_frame(rng);
    const int j = static_cast<int>(rng.integer(1, 2));
    const int k = static_cast<int>(rng.integer(1, f.dim() - j));
    const MV u = random_homogeneous(rng, f, j);
    const MV v = random_homogeneous(rng, f, j);
    const MV w = random_homogeneous(rng, f, k);
    const Rational a = rng.rational();
    const Rational b = rng.rational();

    const MV uw = wedge(u, w);
    const MV wu = wedge(w, u);
    if (!(uw == ((j * k) % 2 ? -wu : wu))) ++anti;

    if (!(wedge(a * u + b * v, w) == a * uw + b * wedge(v, w))) ++bilin;

    // Submultiplicativity is a statement about decomposable elements.
    const MV bu = random_blade(rng, f, j);
    const MV bw = random_blade(rng, f, k);
    if (nu_squared(wedge(bu, bw)) > nu_squared(bu) * nu_squared(bw)) ++submult;

    if (nu_squared(a * w) != a * a * nu_squared(w)) ++homog;

    const Frame lf = Frame::lattice(f.n);
    const int g = static_cast<int>(rng.integer(1, lf.dim()));
    const MV p = random_homogeneous(rng, lf, g);
    const MV q = random_homogeneous(rng, lf, g);
    if (p.is_zero() || q.is_zero()) continue;
    const MV pq = a * p + b * q;
    if (pq.is_zero()) continue;
    const auto cp = c_map(p);
    const auto cq = c_map(q);
    const auto cpq = c_map(pq);
    for (std::size_t r = 0; r < cp.size(); ++r)
      if (!(cpq[r] == a * cp[r] + b * cq[r])) {
        ++clin;
        break;
      }
  }
  const double secs = seconds_since(t0);
  const std::size_t bad = anti + bilin + submult + homog + clin;
  return {bad == 0 && secs < kExteriorSeconds,
          cat(kExteriorCases, " cases each; failures antisym=", anti, " bilinear=", bilin, " submult=", submult,
              " homog=", homog, " c-linear=", clin, "; ", secs, " s < ", kExteriorSeconds, " s")};
}

// ---- 2, 3: exponents -------------------------------------------------------

Outcome omega_consistency() {
  Rng rng(202);
  std::size_t class_mismatch = 0;
  std::size_t value_mismatch = 0;
  double worst = 0.0;
  auto compare = [&](const Entry& a0, const Entry& a1) {
    const AffineSubspace h(1, 2, {a0}, {{a1}});
    const EntryMatrix a{{a0}, {a1}};
    const auto big = omega(a, kOmegaQ);
    const auto matched = omega(a, kOmegaHeight);
    const auto w1 = omega_j(h, 1, MultivectorSearch{kOmegaHeight, 50'000'000, 8});
    if (big.infinite != w1.infinite) {
      ++class_mismatch;
      return;
    }
    if (!w1.infinite) {
      const double d = std::abs(w1.value - matched.value);
      worst = std::max(worst, d);
      if (!(d <= kOmegaTolerance)) ++value_mismatch;
    }
  };
  for (int i = 0; i < kOmegaRational; ++i) {
    // Denominators up to 5 keep the annihilating vector inside the height.
    const long long d0 = rng.integer(1, 5);
    const long long d1 = rng.integer(1, 5);
    compare(Entry(Rational(rng.integer(-d0, d0), d0)), Entry(Rational(rng.integer(-d1, d1), d1)));
  }
  const char* quad[][2] = {{"sqrt2-1", "sqrt3-1"}, {"phi", "sqrt2"}, {"sqrt5-2", "sqrt3/2"},
                           {"(sqrt3-1)/2", "sqrt2/3"}, {"phi-1", "sqrt5/4"}};
  for (const auto& q : quad) compare(parse_entry(q[0]), parse_entry(q[1]));
  return {class_mismatch == 0 && value_mismatch == 0,
          cat(kOmegaRational, " rational + 5 quadratic; classification mismatches=", class_mismatch,
              ", finite mismatches=", value_mismatch, ", worst |omega_1 - omega|=", worst, " <= ",
              kOmegaTolerance)};
}

Outcome golden_ratio() {
  const auto t0 = Clock::now();
  const auto e = omega({{parse_entry("phi")}}, 10'000);
  const double secs = seconds_since(t0);
  return {!e.infinite && e.value >= kGoldenLow && e.value <= kGoldenHigh && secs < kGoldenSeconds,
          cat("omega(phi, Q=1e4)=", e.value, " in [", kGoldenLow, ", ", kGoldenHigh, "]; ", secs, " s < ",
              kGoldenSeconds, " s")};
}

// ---- 4: goodness -----------------------------------------------------------

Polynomial random_polynomial(Rng& rng, int s, int l) {
  std::vector<Polynomial::Term> terms;
  std::vector<int> e(s, 0);
  // All monomials of total degree <= l.
  std::function<void(int, int)> rec = [&](int var, int left) {
    if (var == s) {
      terms.emplace_back(e, rng.uniform(-2, 2));
      return;
    }
    for (int d = 0; d <= left; ++d) {
      e[var] = d;
      rec(var + 1, left - d);
    }
    e[var] = 0;
  };
  rec(0, l);
  return Polynomial(s, terms);
}

Outcome goodness() {
  Rng rng(404);
  std::ostringstream detail;
  bool ok = true;
  std::size_t broken_fail = 0;
  std::size_t broken_total = 0;
  for (const auto [s, l] : {std::pair{1, 1}, std::pair{1, 2}, std::pair{2, 1}}) {
    const auto gc = good_constant(s, l);
    std::size_t pass = 0, fail = 0, inconclusive = 0;
    GoodCheckOptions opt;
    opt.error_budget = kGoodBudget;
    if (s == 2) opt.per_axis = 201;
    for (int i = 0; i < kGoodCases; ++i) {
      const auto f = GoodFunction::from_polynomial(random_polynomial(rng, s, l));
      std::vector<double> c;
      for (int k = 0; k < s; ++k) c.push_back(rng.uniform(-1, 1));
      const Ball b(c, rng.uniform(0.1, 1.5));
      const double sup = sup_on_ball(f, b, 101).value;
      const double eps[] = {std::pow(10.0, rng.uniform(-3, 0)) * std::max(sup, 1e-12)};
      const auto r = check_good(f, gc.c, gc.alpha, b, eps, opt);
      if (r.verdict == "pass" || r.verdict == "skipped")
        ++pass;
      else if (r.verdict == "fail")
        ++fail;
      else
        ++inconclusive;
      if (i % 10 == 0) {
        ++broken_total;
        broken_fail += check_good(f, kBrokenC, gc.alpha, b, eps, opt).verdict == "fail";
      }
    }
    ok = ok && fail == 0 && inconclusive == 0;
    detail << "(" << s << "," << l << ") C=" << gc.c << " a=" << gc.alpha << ": pass=" << pass << " fail=" << fail
           << " inconclusive=" << inconclusive << "; ";
  }
  const auto x = GoodFunction::from_polynomial(Polynomial::affine(0, {1}));
  const double half[] = {0.5};
  const bool broken = check_good(x, kBrokenC, 1.0, Ball({0.0}, 1.0), half).verdict == "fail";
  detail << "C=" << kBrokenC << " fails on x over B(0,1): " << (broken ? "yes" : "no") << ", on " << broken_fail << "/"
         << broken_total << " random triples";
  return {ok && broken && broken_fail > 0, detail.str()};
}

// ---- 5, 6: flow ------------------------------------------------------------

Outcome basis_action() {
  Rng rng(505);
  std::size_t bad = 0;
  for (int i = 0; i < kFlowCases; ++i) {
    const int s = static_cast<int>(rng.integer(1, 2));
    const int n = s + static_cast<int>(rng.integer(1, 2));
    const auto h = qkg::fixtures::random_rational_subspace(rng, s, n);
    const auto x = rng.rationals(s);
    Rational a = rng.rational(), b = rng.rational(), c = rng.rational();
    if (a == 0) a = 1;
    if (b == 0) b = 1;
    if (c == 0) c = 1;
    if (!basis_action_check(h, x, a, b, c).all()) ++bad;
  }
  return {bad == 0, cat(kFlowCases, " random rational cases; mismatches (items 1-3 or det u_x != 1)=", bad)};
}

Outcome planted_inclusion() {
  Rng rng(606);
  const auto desk = qkg::fixtures::desk_subspace();
  std::size_t planted = 0, violations = 0, unplanted = 0;
  double worst = 0.0;
  while (planted < kPlanted) {
    const bool use_desk = planted % 2 == 0;
    const int s = use_desk ? 1 : static_cast<int>(rng.integer(1, 2));
    const int n = use_desk ? 2 : s + static_cast<int>(rng.integer(1, 2));
    const auto h = use_desk ? desk : qkg::fixtures::random_rational_subspace(rng, s, n);
    std::vector<double> c;
    for (int i = 0; i < s; ++i) c.push_back(rng.uniform(-0.5, 0.5));
    const Ball u(c, rng.uniform(0.2, 1.0));
    const int t = static_cast<int>(rng.integer(0, n >= 3 ? 4 : 6));
    const double kappa = std::pow(10.0, rng.uniform(-3, 0));
    const auto w = qkg::fixtures::plant_at_witness(rng, h, u, t, kappa);
    if (!w) {
      ++unplanted;
      continue;
    }
    ++planted;
    const auto p = FlowParameters::make(s, n, t, Real(kappa), u.radius, rng.uniform(0, 1.0 / (2 * (n + 1))));
    const Real norm = qkg::fixtures::orbit_norm(h, *w, p);
    const double ratio = to_double(norm / p.eps);
    worst = std::max(worst, ratio);
    if (!(norm < p.eps)) ++violations;
  }
  return {violations == 0, cat(planted, " planted witnesses (", unplanted, " draws without a witness); violations=",
                               violations, ", max ||H(x)lambda||/eps=", worst)};
}

// ---- desk pipeline shared by 7-11 ------------------------------------------

const double kZeta3 = 1.2020569031595942;
const Ball kDeskBall({0.0}, 0.5);

struct Desk {
  AffineSubspace h = qkg::fixtures::desk_subspace();
  MainTheoremReport main;
  double seconds = 0.0;
};

const Desk& desk() {
  static std::optional<Desk> d;
  if (!d) {
    d.emplace();
    MainTheoremRequest req;
    req.h = &d->h;
    req.u = kDeskBall;
    req.psi = PsiFunction::power(1, 2);
    req.xi = 0.5;
    req.bounds.q_max = 64;
    req.bounds.exponent_q = 1000;
    req.bounds.search = MultivectorSearch{20, 50'000'000, 8};
    req.bounds.grid = 10'000;
    req.bounds.t_max = 8;
    req.bounds.measure_at = true;
    const auto t0 = Clock::now();
    d->main = main_theorem_experiment(req);
    d->seconds = seconds_since(t0);
  }
  return *d;
}

Outcome km2_desk() {
  const auto& d = desk();
  const auto& k = d.main.constants;
  const int s = 1, n = 2;
  Km2Bounds b;
  b.top = 0.5;
  b.middle = k["K2"] * k["K3"] * std::sqrt(n * s) / (std::pow(2.0, n / 2.0 + 1) * kDeskBall.radius);
  b.low = k["K5"] / std::pow(2.0, (n + 1) / 2.0);
  b.rho = k["rho"];
  const int ts[] = {0, 2, 4, 6, 8};
  const auto t0 = Clock::now();
  const auto rep = verify_km2(d.h, kDeskBall, Real(d.main.kappa), k["beta"], ts, 201, 10, b);
  const double secs = seconds_since(t0);
  std::size_t violations = 0;
  for (const auto& r : rep.rows) violations += !r.ok;
  return {rep.passed && violations == 0 && secs < kKm2Seconds,
          cat("empirical rho=", rep.empirical_rho, " >= rho=", rep.rho, " over ", rep.subgroups,
              " subgroups, rank-bound violations=", violations, "; ", secs, " s < ", kKm2Seconds, " s")};
}

Outcome nondivergence() {
  const auto& d = desk();
  const auto& k = d.main.constants;
  NondivRequest req;
  req.kappa = Real(d.main.kappa);
  req.beta = k["beta"];
  req.ts = {0, 2, 4, 6, 8};
  for (double f : {0.5, 0.25, 0.125, 0.0625}) req.eps2.push_back(f * k["rho"]);
  req.per_axis = 201;
  req.c = k["C"];
  req.alpha = k["alpha"];
  req.rho = k["rho"];
  req.ns = k["N_s"];
  const auto rep = nondivergence_sweep(d.h, kDeskBall, req);
  double worst = 0.0;
  std::size_t bad = 0;
  for (const auto& r : rep.rows) {
    worst = std::max(worst, r.measured / r.rhs);
    bad += !r.ok;
  }
  return {rep.passed && bad == 0,
          cat(rep.rows.size(), " (t, eps'') rows at rho/2..rho/16, violations=", bad, ", max measured/rhs=", worst,
              ", uncertified SVPs=", rep.uncertified)};
}

Outcome a_tilde_bound() {
  const auto& d = desk();
  std::size_t bad = 0, inclusion = 0;
  double worst = 0.0;
  for (const auto& m : d.main.a_tilde) {
    bad += !m.ok;
    inclusion += !m.inclusion_ok;
    worst = std::max(worst, m.measured / m.bound);
  }
  return {d.main.a_tilde.size() == 9 && bad == 0,
          cat("t=0..", d.main.a_tilde.size() - 1, ": violations=", bad, ", max |A~_t|/bound=", worst,
              ", A_t not in A~_t at ", inclusion, " t values")};
}

Outcome large_budget() {
  const auto& d = desk();
  const auto& k = d.main.constants;
  const double cap = d.main.xi / (2 * k["K_s"] * d.main.sum_psi.upper);
  const auto& l = d.main.large;
  return {d.main.kappa <= cap && l.total <= l.budget && l.per_q_violations == 0,
          cat("kappa=", d.main.kappa, " <= ", cap, "; sum |L_large(q)|=", l.total, " <= (xi/2)|U|=", l.budget,
              "; per-q violations=", l.per_q_violations, " over ", l.large_count, " q")};
}

Outcome main_theorem() {
  const auto& d = desk();
  const auto& m = d.main;
  return {m.total <= m.xi && m.verdict == "pass" && d.seconds < kMainSeconds,
          cat("bad fraction=", m.bad.fraction_bad, " + large tail=", m.bad.large_tail, " + small tail=",
              m.bad.small_tail, " = ", m.total, " <= xi=", m.xi, "; verdict ", m.verdict, "; ", d.seconds,
              " s < ", kMainSeconds, " s")};
}

// ---- 12, 13 ----------------------------------------------------------------

Outcome dirichlet() {
  const auto h = qkg::fixtures::desk_subspace();
  const auto pts = grid_points(kDeskBall, 10'000);
  const auto rep = measure_bad_set(h, kDeskBall, PsiFunction::power(1, 1), 1.0, 64, pts);
  return {rep.fraction_bad >= kDirichletFloor,
          cat("psi=1/k, kappa=1, Q=64: fraction bad=", rep.fraction_bad, " >= ", kDirichletFloor, " over ",
              rep.points, " points")};
}

Outcome constants() {
  const double ks = k_s_constant(1, BesicovitchTable().at(1));
  const auto km1 = km1_constants(1, 2);
  const auto g11 = good_constant(1, 1);
  double worst = 0.0;
  for (int n : {2, 3})
    for (double beta : {1.0 / 24, 1.0 / 12, 0.1}) {
      if (beta >= 1.0 / (2 * (n + 1))) continue;
      const double k1 = k1_constant(1, n, beta);
      const double partial = k1_partial_sum(1, n, beta, 100'000);
      worst = std::max(worst, std::abs(k1 - partial));
    }
  const bool ok = ks == 64 && km1.c == 16 && km1.alpha == 1 && g11.c == 4 && g11.alpha == 1 && worst <= kK1Tolerance;
  return {ok, cat("K_1=", ks, " (N_1=2); km1(1,2)=(", km1.c, ",", km1.alpha, "); good(1,1)=(", g11.c, ",",
                  g11.alpha, "); |K1 - partial sum|=", worst, " <= ", kK1Tolerance)};
}

}  // namespace

int main() {
  report(1, "exterior algebra suite", exterior_suite);
  report(2, "omega_1 = omega consistency", omega_consistency);
  report(3, "golden-ratio exponent", golden_ratio);
  report(4, "goodness constants", goodness);
  report(5, "flow basis action", basis_action);
  report(6, "planted A_t witnesses lie in A~_t", planted_inclusion);
  report(7, "KM2 desk check", km2_desk);
  report(8, "nondivergence sweep", nondivergence);
  report(9, "A~_t measure bound", a_tilde_bound);
  report(10, "large-gradient budget", large_budget);
  report(11, "main theorem desk run", main_theorem);
  report(12, "Dirichlet sanity", dirichlet);
  report(13, "constant arithmetic", constants);
  std::printf("%d/13 criteria passed\n", 13 - failures);
  return failures == 0 ? 0 : 1;
}
