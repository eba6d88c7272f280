#include "qkg/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <stdexcept>

namespace qkg {

namespace {

Real pow2(const Real& e) { return boost::multiprecision::pow(Real(2), e); }

std::vector<Real> as_real(std::span<const double> x) { return std::vector<Real>(x.begin(), x.end()); }

// Calls fn(q) for one of each +-q != 0 with ||q||_inf < tbound and
// |q_i + (A'^T q_tail)_i| < kbound on the head coordinates. fn returns true
// to stop the scan.
template <class Fn>
bool scan_q(const AffineSubspace& h, double tbound, double kbound, Fn&& fn) {
  const int s = h.s();
  const int n = h.n();
  const int m = h.codim();
  const long long qmax = static_cast<long long>(std::ceil(tbound)) - 1;
  if (qmax < 0) return false;
  if (std::pow(2.0 * qmax + 1, m) * std::pow(std::min(2.0 * kbound + 1, 2.0 * qmax + 1), s) > 1e11)
    throw std::length_error("A~_t scan box is too large");
  std::vector<std::vector<double>> ap(s, std::vector<double>(m));
  for (int i = 0; i < s; ++i)
    for (int l = 0; l < m; ++l) ap[i][l] = h.a(i + 1, l).approx();

  std::vector<long long> q(n, 0);
  std::vector<long long> tail(m, -qmax);
  std::vector<double> centre(s);
  for (;;) {
    // Canonical sign: first nonzero tail entry positive.
    int first = 0;
    while (first < m && tail[first] == 0) ++first;
    const bool tail_zero = first == m;
    if (tail_zero || tail[first] > 0) {
      for (int l = 0; l < m; ++l) q[s + l] = tail[l];
      for (int i = 0; i < s; ++i) {
        double c = 0.0;
        for (int l = 0; l < m; ++l) c -= ap[i][l] * static_cast<double>(tail[l]);
        centre[i] = c;
      }
      std::vector<long long> lo(s), hi(s);
      bool empty = false;
      for (int i = 0; i < s; ++i) {
        lo[i] = std::max(static_cast<long long>(std::floor(centre[i] - kbound)), -qmax);
        hi[i] = std::min(static_cast<long long>(std::ceil(centre[i] + kbound)), qmax);
        if (lo[i] > hi[i]) empty = true;
      }
      if (!empty) {
        std::vector<long long> head(lo);
        for (;;) {
          bool keep = true;
          if (tail_zero) {
            int f = 0;
            while (f < s && head[f] == 0) ++f;
            keep = f < s && head[f] > 0;
          }
          if (keep) {
            for (int i = 0; i < s; ++i) q[i] = head[i];
            bool inside = true;
            for (int i = 0; i < s && inside; ++i) inside = std::abs(static_cast<double>(head[i]) - centre[i]) < kbound;
            if (inside && fn(std::span<const long long>(q))) return true;
          }
          int k = 0;
          while (k < s && ++head[k] > hi[k]) head[k] = lo[k], ++k;
          if (k == s) break;
        }
      }
    }
    int k = 0;
    while (k < m && ++tail[k] > qmax) tail[k++] = -qmax;
    if (k == m) break;
  }
  return false;
}

double gradient_sup(const AffineSubspace& h, std::span<const long long> q) {
  double best = 0.0;
  for (int i = 0; i < h.s(); ++i) {
    double v = static_cast<double>(q[i]);
    for (int l = 0; l < h.codim(); ++l) v += h.a(i + 1, l).approx() * static_cast<double>(q[h.s() + l]);
    best = std::max(best, std::abs(v));
  }
  return best;
}

long long sup_abs(std::span<const long long> q) {
  long long m = 0;
  for (long long v : q) m = std::max(m, v < 0 ? -v : v);
  return m;
}

}  // namespace

FlowParameters FlowParameters::make(int s, int n, int t, const Real& kappa, double r, double beta) {
  if (s < 1 || n <= s) throw std::invalid_argument("flow parameters need 1 <= s < n");
  if (t < 0) throw std::invalid_argument("t must be nonnegative");
  if (!(kappa > 0) || kappa > 1) throw std::invalid_argument("kappa must lie in (0, 1]");
  if (!(r > 0)) throw std::invalid_argument("radius must be positive");
  if (!(beta >= 0) || !(beta < 1.0 / (2.0 * (n + 1)))) throw std::invalid_argument("beta must lie in [0, 1/(2(n+1)))");
  FlowParameters p;
  p.s = s;
  p.n = n;
  p.t = t;
  p.kappa = kappa;
  p.r = r;
  p.beta = beta;
  p.delta = kappa / pow2(Real(n * t));
  const Real rr(r);
  p.k_grad = boost::multiprecision::sqrt(Real(n * s) / (2 * rr * rr)) * pow2(Real(t) / 2);
  p.T = pow2(Real(t + 1));
  p.eps_prime = boost::multiprecision::pow(p.delta * p.k_grad * boost::multiprecision::pow(p.T, n - 1),
                                           Real(1) / (n + 1));
  p.eps = pow2(Real(beta) * t) * p.eps_prime;
  return p;
}

Matrix<Real> g_matrix(const FlowParameters& p) {
  return scale_matrix<Real>(p.s, p.n, p.g_origin(), p.g_star(), p.g_coord());
}

Matrix<Real> h_matrix(const AffineSubspace& h, std::span<const double> x, const FlowParameters& p) {
  const auto xr = as_real(x);
  return g_matrix(p) * u_matrix<Real>(h, std::span<const Real>(xr));
}

SubgroupBasis lambda_basis(int s, int n) {
  std::vector<std::vector<long long>> rows;
  for (int i = 0; i <= n; ++i) {
    std::vector<long long> v(n + 1, 0);
    v[i] = 1;
    rows.push_back(v);
  }
  return embed_in_ambient(s, n, rows);
}

SubgroupBasis embed_in_ambient(int s, int n, const std::vector<std::vector<long long>>& lattice_vectors) {
  SubgroupBasis b{Frame::ambient(s, n), {}};
  for (const auto& v : lattice_vectors) {
    if (static_cast<int>(v.size()) != n + 1) throw std::invalid_argument("Lambda vector must have n+1 entries");
    std::vector<long long> a(1 + s + n, 0);
    a[0] = v[0];
    for (int i = 0; i < n; ++i) a[1 + s + i] = v[1 + i];
    b.vectors.push_back(std::move(a));
  }
  return b;
}

BasisActionResult basis_action_check(const AffineSubspace& h, std::span<const Rational> x, const Rational& a,
                                     const Rational& b, const Rational& c) {
  const int s = h.s();
  const int n = h.n();
  const int d = 1 + s + n;
  const Matrix<Rational> u = u_matrix<Rational>(h, x);
  const Matrix<Rational> hm = scale_matrix<Rational>(s, n, a, b, c) * u;
  const auto f = h.parametrize<Rational>(x);
  const Matrix<Rational> grad = h.gradient_matrix<Rational>();

  BasisActionResult res;
  res.det_one = u.determinant() == Rational(1);
  std::vector<Rational> expect(d);
  auto column_is = [&](int col) {
    for (int r = 0; r < d; ++r)
      if (hm(r, col) != expect[r]) return false;
    return true;
  };
  std::fill(expect.begin(), expect.end(), Rational(0));
  expect[0] = a;
  res.origin = column_is(0);
  res.star = true;
  for (int i = 0; i < s; ++i) {
    std::fill(expect.begin(), expect.end(), Rational(0));
    expect[1 + i] = b;
    res.star = res.star && column_is(1 + i);
  }
  res.coord = true;
  for (int i = 0; i < n; ++i) {
    std::fill(expect.begin(), expect.end(), Rational(0));
    expect[0] = a * f[i];
    for (int j = 0; j < s; ++j) expect[1 + j] = b * grad(j, i);
    expect[1 + s + i] += c;
    res.coord = res.coord && column_is(1 + s + i);
  }
  return res;
}

std::optional<AtWitness> in_A_t(const AffineSubspace& h, std::span<const double> x, int t, const Real& kappa,
                                double r) {
  if (t < 0) throw std::invalid_argument("t must be nonnegative");
  const int s = h.s();
  const int n = h.n();
  const double delta = to_double(kappa / pow2(Real(n * t)));
  const double kgrad = std::sqrt(n * s / (2.0 * r * r)) * std::pow(2.0, t / 2.0);
  const long long lower = 1LL << t;
  const double upper = std::ldexp(1.0, t + 1);
  const LinearForm form = h.form_at(x);
  std::optional<AtWitness> found;
  scan_q(h, upper, kgrad, [&](std::span<const long long> q) {
    if (sup_abs(q) < lower) return false;
    const double g = gradient_sup(h, q);
    if (!(g < kgrad)) return false;
    const Residual res = form.nearest(q);
    if (!(res.zero || std::abs(res.value) < delta)) return false;
    found = AtWitness{-res.nearest, std::vector<long long>(q.begin(), q.end()), std::abs(res.value), g, res.exact};
    return true;
  });
  return found;
}

std::optional<TildeWitness> in_A_tilde(const AffineSubspace& h, std::span<const double> x, const FlowParameters& p,
                                       std::optional<double> threshold) {
  const Real thr = threshold ? Real(*threshold) : p.eps;
  const double scale = to_double(thr / p.eps);
  const double dbound = to_double(thr / p.g_origin());
  const double kbound = scale * to_double(p.k_grad);
  const double tbound = scale * to_double(p.T);
  const double g0 = to_double(p.g_origin());
  const double gs = to_double(p.g_star());
  const double gc = to_double(p.g_coord());

  if (dbound > 1.0) return TildeWitness{1, std::vector<long long>(h.n(), 0), g0};
  const LinearForm form = h.form_at(x);
  std::optional<TildeWitness> found;
  scan_q(h, tbound, kbound, [&](std::span<const long long> q) {
    const Residual res = form.nearest(q);
    if (!(res.zero || std::abs(res.value) < dbound)) return false;
    const double norm = std::max({std::abs(res.value) * g0, gradient_sup(h, q) * gs, static_cast<double>(sup_abs(q)) * gc});
    found = TildeWitness{-res.nearest, std::vector<long long>(q.begin(), q.end()), norm};
    return true;
  });
  return found;
}

LatticeBasis orbit_lattice_basis(const AffineSubspace& h, std::span<const double> x, const FlowParameters& p) {
  const Matrix<Real> m = h_matrix(h, x, p);
  LatticeBasis b;
  b.vectors.push_back(m.column(0));
  for (int i = 0; i < h.n(); ++i) b.vectors.push_back(m.column(1 + h.s() + i));
  return b;
}

SvpResult orbit_shortest_vector(const AffineSubspace& h, std::span<const double> x, const FlowParameters& p,
                                NormKind kind) {
  return shortest_vector(orbit_lattice_basis(h, x, p), 1e300, kind);
}

namespace {

using Int = __int128;

Int bareiss_det(std::vector<std::vector<Int>> m) {
  const std::size_t k = m.size();
  Int prev = 1;
  int sign = 1;
  for (std::size_t c = 0; c < k; ++c) {
    if (m[c][c] == 0) {
      std::size_t r = c + 1;
      while (r < k && m[r][c] == 0) ++r;
      if (r == k) return 0;
      std::swap(m[c], m[r]);
      sign = -sign;
    }
    for (std::size_t r = c + 1; r < k; ++r)
      for (std::size_t j = c + 1; j < k; ++j) m[r][j] = (m[r][j] * m[c][c] - m[r][c] * m[c][j]) / prev;
    prev = m[c][c];
  }
  return sign * m[k - 1][k - 1];
}

Int gcd_i(Int a, Int b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const Int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool is_primitive(const std::vector<std::vector<long long>>& rows, int dim) {
  const int k = static_cast<int>(rows.size());
  std::vector<int> cols(k);
  std::iota(cols.begin(), cols.end(), 0);
  Int g = 0;
  for (;;) {
    std::vector<std::vector<Int>> m(k, std::vector<Int>(k));
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) m[r][c] = rows[r][cols[c]];
    g = gcd_i(g, bareiss_det(std::move(m)));
    if (g == 1) return true;
    int i = k - 1;
    while (i >= 0 && cols[i] == dim - k + i) --i;
    if (i < 0) break;
    ++cols[i];
    for (int j = i + 1; j < k; ++j) cols[j] = cols[j - 1] + 1;
  }
  return g == 1;
}

}  // namespace

std::vector<std::vector<std::vector<long long>>> primitive_hnf_bases(int dim, int k, long long height,
                                                                    std::size_t cap) {
  if (k < 1 || k > dim) throw std::invalid_argument("rank must satisfy 1 <= k <= dim");
  if (height < 1) throw std::invalid_argument("height must be >= 1");
  std::vector<std::vector<std::vector<long long>>> out;
  std::vector<int> piv(k);
  std::iota(piv.begin(), piv.end(), 0);
  std::vector<std::vector<long long>> rows(k, std::vector<long long>(dim, 0));
  std::vector<long long> pval(k, 1);

  for (;;) {
    // Pivot values first (they bound the entries above later pivots), then
    // the free entries of each row.
    std::vector<std::pair<int, int>> free_cells;  // (row, col)
    auto enumerate_values = [&](auto&& self, int r) -> void {
      if (r == k) {
        for (auto& row : rows) std::fill(row.begin(), row.end(), 0);
        for (int i = 0; i < k; ++i) rows[i][piv[i]] = pval[i];
        free_cells.clear();
        for (int i = 0; i < k; ++i)
          for (int c = piv[i] + 1; c < dim; ++c) free_cells.emplace_back(i, c);
        auto fill = [&](auto&& fself, std::size_t idx) -> void {
          if (idx == free_cells.size()) {
            if (is_primitive(rows, dim)) {
              if (out.size() >= cap) throw std::length_error("primitive subgroup enumeration exceeded its cap");
              out.push_back(rows);
            }
            return;
          }
          const auto [i, c] = free_cells[idx];
          const auto it = std::find(piv.begin() + i + 1, piv.end(), c);
          long long lo = -height;
          long long hi = height;
          if (it != piv.end()) {
            const std::size_t j = static_cast<std::size_t>(it - piv.begin());
            lo = 0;
            hi = pval[j] - 1;
          }
          for (long long v = lo; v <= hi; ++v) {
            rows[i][c] = v;
            fself(fself, idx + 1);
          }
          rows[i][c] = 0;
        };
        fill(fill, 0);
        return;
      }
      for (long long v = 1; v <= height; ++v) {
        pval[r] = v;
        self(self, r + 1);
      }
    };
    enumerate_values(enumerate_values, 0);

    int i = k - 1;
    while (i >= 0 && piv[i] == dim - k + i) --i;
    if (i < 0) break;
    ++piv[i];
    for (int j = i + 1; j < k; ++j) piv[j] = piv[j - 1] + 1;
  }
  return out;
}

std::vector<SubgroupBasis> enumerate_primitive_subgroups(int s, int n, int k, long long height, std::size_t cap) {
  std::vector<SubgroupBasis> out;
  for (const auto& rows : primitive_hnf_bases(n + 1, k, height, cap)) out.push_back(embed_in_ambient(s, n, rows));
  return out;
}

double nu_orbit(const AffineSubspace& h, std::span<const double> x, const FlowParameters& p,
                const SubgroupBasis& gamma) {
  const auto w = represent<Real>(gamma);
  return to_double(nu(push_forward(h_matrix(h, x, p), w)));
}

NuOrbit::NuOrbit(const AffineSubspace& h, const SubgroupBasis& gamma) : s_(h.s()) {
  const auto w = represent<Real>(gamma);
  grade_ = w.grade();
  std::vector<Real> x(s_, Real(0));
  const auto base = project_star(push_forward(u_matrix<Real>(h, std::span<const Real>(x)), w));
  std::vector<Multivector<Real>> slopes;
  for (int i = 0; i < s_; ++i) {
    x.assign(s_, Real(0));
    x[i] = 1;
    slopes.push_back(project_star(push_forward(u_matrix<Real>(h, std::span<const Real>(x)), w)) - base);
  }
  for (const auto& [b, c] : base.terms()) blades_.push_back(b);
  for (const auto& sl : slopes)
    for (const auto& [b, c] : sl.terms()) blades_.push_back(b);
  std::sort(blades_.begin(), blades_.end());
  blades_.erase(std::unique(blades_.begin(), blades_.end()), blades_.end());
  for (Blade b : blades_) p0_.push_back(base.coefficient(b));
  pi_.resize(s_);
  for (int i = 0; i < s_; ++i)
    for (Blade b : blades_) pi_[i].push_back(slopes[i].coefficient(b));
}

void NuOrbit::bind(const FlowParameters& p) {
  const Frame f = Frame::ambient(p.s, p.n);
  const Blade stars = f.star_mask();
  const Real g0 = p.g_origin();
  const Real gs = p.g_star();
  const Real gc = p.g_coord();
  c0_.assign(blades_.size(), 0.0);
  ci_.assign(s_, std::vector<double>(blades_.size(), 0.0));
  for (std::size_t k = 0; k < blades_.size(); ++k) {
    const Blade b = blades_[k];
    const int nstar = std::popcount(b & stars);
    const int ncoord = std::popcount(b & ~stars & ~Blade{1});
    Real scale = boost::multiprecision::pow(gs, nstar) * boost::multiprecision::pow(gc, ncoord);
    if (b & 1) scale *= g0;
    c0_[k] = to_double(scale * p0_[k]);
    for (int i = 0; i < s_; ++i) ci_[i][k] = to_double(scale * pi_[i][k]);
  }
}

double NuOrbit::operator()(std::span<const double> x) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < c0_.size(); ++k) {
    double v = c0_[k];
    for (int i = 0; i < s_; ++i) v += x[i] * ci_[i][k];
    acc += v * v;
  }
  return std::sqrt(acc);
}

double NuOrbit::sup_norm_at(std::span<const double> x) const {
  double best = 0.0;
  for (std::size_t k = 0; k < c0_.size(); ++k) {
    double v = c0_[k];
    for (int i = 0; i < s_; ++i) v += x[i] * ci_[i][k];
    best = std::max(best, std::abs(v));
  }
  return best;
}

double NuOrbit::sup_over(const SamplePoints& pts) const {
  // The map is the norm of an affine function, hence convex: on a line its
  // maximum over a point set sits at the extreme points.
  double best = 0.0;
  if (pts.dim == 1 && pts.size() > 0) {
    std::size_t lo = 0;
    std::size_t hi = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (pts.coords[i] < pts.coords[lo]) lo = i;
      if (pts.coords[i] > pts.coords[hi]) hi = i;
    }
    return std::max((*this)(pts.point(lo)), (*this)(pts.point(hi)));
  }
  for (std::size_t i = 0; i < pts.size(); ++i) best = std::max(best, (*this)(pts.point(i)));
  return best;
}

Km1Report verify_km1(const AffineSubspace& h, const Ball& u, const FlowParameters& p,
                     const std::vector<SubgroupBasis>& subgroups, double c, double alpha,
                     std::span<const double> eps_fractions, int per_axis) {
  Km1Report rep;
  rep.ratio_lower = std::pow(2.0, -(1.0 + h.s() + h.n()) / 2.0);
  const SamplePoints probe = grid_points(u, std::max(3, std::min(per_axis, 21)));
  GoodCheckOptions opt;
  opt.per_axis = per_axis;
  for (const auto& g : subgroups) {
    auto orbit = std::make_shared<NuOrbit>(h, g);
    orbit->bind(p);
    GoodFunction f;
    f.dim = h.s();
    f.label = "nu(H(x) Gamma)";
    f.eval = [orbit](std::span<const double> x) { return (*orbit)(x); };
    if (h.s() == 1)
      f.exact_sup = [orbit](const Ball& b) -> std::optional<double> {
        const double lo = b.center[0] - b.radius;
        const double hi = b.center[0] + b.radius;
        return std::max((*orbit)(std::span<const double>(&lo, 1)), (*orbit)(std::span<const double>(&hi, 1)));
      };
    const double sup = sup_on_ball(f, u, per_axis).value;
    std::vector<double> eps;
    for (double fr : eps_fractions) eps.push_back(fr * sup);
    const auto r = check_good(f, c, alpha, u, eps, opt);
    ++rep.checked;
    if (r.verdict == "pass" || r.verdict == "skipped")
      ++rep.passed;
    else if (r.verdict == "fail")
      ++rep.failed;
    else
      ++rep.inconclusive;
    rep.worst_good_ratio = std::max(rep.worst_good_ratio, r.worst_ratio);
    for (std::size_t i = 0; i < probe.size(); ++i) {
      const double nv = (*orbit)(probe.point(i));
      if (nv == 0.0) continue;
      const double ratio = orbit->sup_norm_at(probe.point(i)) / nv;
      rep.min_ratio = std::min(rep.min_ratio, ratio);
      rep.max_ratio = std::max(rep.max_ratio, ratio);
    }
  }
  rep.ratio_ok = rep.min_ratio >= rep.ratio_lower && rep.max_ratio <= 1.0 + 1e-12;
  rep.verdict = rep.failed > 0 || !rep.ratio_ok ? "fail" : rep.inconclusive > 0 ? "inconclusive" : "pass";
  return rep;
}

Km2Report verify_km2(const AffineSubspace& h, const Ball& u, const Real& kappa, double beta,
                     std::span<const int> ts, int per_axis, long long height, const Km2Bounds& bounds,
                     std::size_t cap) {
  const int s = h.s();
  const int n = h.n();
  const SamplePoints pts = grid_points(u, per_axis);
  Km2Report rep;
  rep.rho = bounds.rho;
  rep.empirical_rho = std::numeric_limits<double>::infinity();

  struct Family {
    int rank;
    std::vector<std::vector<std::vector<long long>>> bases;
    std::vector<NuOrbit> orbits;
  };
  std::vector<Family> families;
  for (int k = 1; k <= n + 1; ++k) {
    Family fam{k, primitive_hnf_bases(n + 1, k, height, cap), {}};
    fam.orbits.reserve(fam.bases.size());
    for (const auto& b : fam.bases) fam.orbits.emplace_back(h, embed_in_ambient(s, n, b));
    rep.subgroups += fam.bases.size();
    families.push_back(std::move(fam));
  }

  bool all_ok = true;
  for (int t : ts) {
    const FlowParameters p = FlowParameters::make(s, n, t, kappa, u.radius, beta);
    for (auto& fam : families) {
      Km2RankRow row;
      row.t = t;
      row.rank = fam.rank;
      row.subgroups = fam.orbits.size();
      row.bound = fam.rank == n + 1 ? bounds.top : fam.rank > n - s ? bounds.middle : bounds.low;
      row.min_sup = std::numeric_limits<double>::infinity();
      std::size_t worst = 0;
      for (std::size_t i = 0; i < fam.orbits.size(); ++i) {
        fam.orbits[i].bind(p);
        const double v = fam.orbits[i].sup_over(pts);
        if (v < row.min_sup) {
          row.min_sup = v;
          worst = i;
        }
      }
      if (!fam.bases.empty()) row.worst = fam.bases[worst];
      row.ok = row.min_sup >= row.bound;
      all_ok = all_ok && row.ok;
      if (row.min_sup < rep.empirical_rho) {
        rep.empirical_rho = row.min_sup;
        rep.worst_t = t;
        rep.worst = row.worst;
      }
      rep.rows.push_back(std::move(row));
    }
  }
  rep.passed = all_ok && rep.empirical_rho >= rep.rho;
  return rep;
}

TildeBound tilde_lower_bound(const AffineSubspace& h, const Ball& u, const FlowParameters& p,
                             const Multivector<Rational>& w, double k2, int per_axis) {
  const int s = h.s();
  const int n = h.n();
  if (w.frame().stars != 0 || w.frame().n != n) throw std::invalid_argument("w must live in W_{0->n}");
  const int k = w.grade();
  if (!w.homogeneous() || k < 1 || k > n) throw std::invalid_argument("w must be homogeneous of grade 1..n");

  const auto wr = w.convert<Real>([](const Rational& q) { return to_real(q); });
  const auto c = c_map(wr);
  const SamplePoints pts = grid_points(u, per_axis);
  const Real gt = p.g_coord();
  const Real rc_scale = boost::multiprecision::pow(p.eps, k) / (p.delta * boost::multiprecision::pow(p.T, k - 1));

  TildeBound out;
  double rc_sup = 0.0;
  for (std::size_t idx = 0; idx < pts.size(); ++idx) {
    const auto xs = pts.point(idx);
    const auto xr = as_real(xs);
    const auto f = h.parametrize<Real>(std::span<const Real>(xr));
    Matrix<Real> m = Matrix<Real>::identity(n + 1);
    for (int i = 0; i < n; ++i) m(0, 1 + i) = f[i];
    for (int i = 0; i <= n; ++i) m(0, i) *= p.g_origin();
    for (int r = 1; r <= n; ++r) m(r, r) = gt;
    out.direct = std::max(out.direct, to_double(sup_norm(push_forward(m, wr))));

    Multivector<Real> acc = c[0];
    for (int i = 0; i < n; ++i) acc = acc + f[i] * c[1 + i];
    rc_sup = std::max(rc_sup, to_double(sup_norm(acc)));
  }
  out.rc_term = to_double(rc_scale) * rc_sup;
  const auto pi_w = wr.filter([](Blade b) { return (b & 1) == 0; });
  out.pi_term = to_double(boost::multiprecision::pow(gt, k) * sup_norm(pi_w));
  out.max_term = std::max(out.rc_term, out.pi_term);
  const double shrink = std::pow(2.0, (n + 1) / 2.0);
  out.bound = out.max_term / shrink;

  Real rnorm(0);
  for (int row = 0; row <= s; ++row) {
    Multivector<Real> v = c[row];
    for (int l = 0; l < h.codim(); ++l) v = v + h.a(row, l).value() * c[s + 1 + l];
    rnorm = std::max(rnorm, sup_norm(v));
  }
  out.k2_bound = to_double(rc_scale * rnorm) * k2 / shrink;
  return out;
}

double nondivergence_rhs(double c, double alpha, double rho, double eps2, int k, int s, double ns,
                         double ball_measure) {
  if (!(rho > 0 && rho < 1)) throw std::invalid_argument("rho must lie in (0, 1)");
  if (!(eps2 > 0)) throw std::invalid_argument("eps'' must be positive");
  return k * std::pow(std::pow(3.0, s) * ns, k) * c * std::pow(eps2 / rho, alpha) * ball_measure;
}

NondivReport nondivergence_sweep(const AffineSubspace& h, const Ball& u, const NondivRequest& req) {
  const int s = h.s();
  const int n = h.n();
  const SamplePoints pts = grid_points(u, req.per_axis);
  NondivReport rep;
  rep.points = pts.size();
  bool ok = true;
  for (int t : req.ts) {
    const FlowParameters p = FlowParameters::make(s, n, t, req.kappa, u.radius, req.beta);
    std::vector<std::size_t> hits(req.eps2.size(), 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const SvpResult sv = orbit_shortest_vector(h, pts.point(i), p, NormKind::euclidean);
      if (!sv.certified) ++rep.uncertified;
      for (std::size_t e = 0; e < req.eps2.size(); ++e)
        if (!sv.certified || sv.norm < Real(req.eps2[e])) ++hits[e];
    }
    for (std::size_t e = 0; e < req.eps2.size(); ++e) {
      NondivRow row;
      row.t = t;
      row.eps2 = req.eps2[e];
      row.measured = static_cast<double>(hits[e]) / static_cast<double>(pts.size()) * u.volume();
      row.rhs = nondivergence_rhs(req.c, req.alpha, req.rho, req.eps2[e], n + 1, s, req.ns, u.volume());
      row.ok = row.measured <= row.rhs;
      ok = ok && row.ok;
      rep.rows.push_back(row);
    }
  }
  rep.passed = ok;
  return rep;
}

ATildeMeasurement measure_A_tilde(const AffineSubspace& h, const Ball& u, const FlowParameters& p,
                                  const SamplePoints& pts, double k0, bool with_at) {
  ATildeMeasurement m;
  m.t = p.t;
  m.points = pts.size();
  m.at_measured = with_at;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const bool tilde = in_A_tilde(h, pts.point(i), p).has_value();
    m.members += tilde;
    if (with_at && in_A_t(h, pts.point(i), p.t, p.kappa, p.r)) {
      ++m.members_at;
      if (!tilde) m.inclusion_ok = false;
    }
  }
  const double frac = pts.size() ? 1.0 / static_cast<double>(pts.size()) : 0.0;
  m.measured = m.members * frac * u.volume();
  m.measured_at = m.members_at * frac * u.volume();
  const double rate = (1.0 / (2.0 * (p.n + 1)) - p.beta) / p.s;
  m.bound = k0 * std::pow(to_double(p.kappa), 1.0 / (p.s * (p.n + 1.0))) * std::pow(2.0, -rate * p.t) * u.volume();
  m.ok = m.measured <= m.bound;
  return m;
}

}  // namespace qkg
