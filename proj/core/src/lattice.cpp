#include "qkg/lattice.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qkg {

namespace {

using Vec = std::vector<Real>;

Real dot(const Vec& a, const Vec& b) {
  Real acc(0);
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

struct GramSchmidt {
  std::vector<Vec> mu;  // mu[i][j], j < i
  Vec b;                // squared norms of b*_i
};

GramSchmidt gram_schmidt(const std::vector<Vec>& rows) {
  const std::size_t d = rows.size();
  GramSchmidt gs;
  gs.mu.assign(d, Vec(d, Real(0)));
  gs.b.assign(d, Real(0));
  std::vector<Vec> star(d);
  for (std::size_t i = 0; i < d; ++i) {
    star[i] = rows[i];
    for (std::size_t j = 0; j < i; ++j) {
      gs.mu[i][j] = dot(rows[i], star[j]) / gs.b[j];
      for (std::size_t c = 0; c < star[i].size(); ++c) star[i][c] -= gs.mu[i][j] * star[j][c];
    }
    gs.b[i] = dot(star[i], star[i]);
    if (gs.b[i] == 0) throw std::invalid_argument("lattice basis rows are linearly dependent");
  }
  return gs;
}

Real norm_of(const Vec& v, NormKind kind) {
  if (kind == NormKind::euclidean) return boost::multiprecision::sqrt(dot(v, v));
  Real best(0);
  for (const auto& c : v) best = std::max(best, Real(boost::multiprecision::abs(c)));
  return best;
}

// Gauss-Jordan inverse of a small symmetric positive definite matrix.
std::vector<Vec> invert(std::vector<Vec> m) {
  const std::size_t d = m.size();
  std::vector<Vec> inv(d, Vec(d, Real(0)));
  for (std::size_t i = 0; i < d; ++i) inv[i][i] = 1;
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < d; ++r)
      if (boost::multiprecision::abs(m[r][c]) > boost::multiprecision::abs(m[piv][c])) piv = r;
    std::swap(m[c], m[piv]);
    std::swap(inv[c], inv[piv]);
    const Real p = m[c][c];
    for (std::size_t k = 0; k < d; ++k) {
      m[c][k] /= p;
      inv[c][k] /= p;
    }
    for (std::size_t r = 0; r < d; ++r) {
      if (r == c || m[r][c] == 0) continue;
      const Real f = m[r][c];
      for (std::size_t k = 0; k < d; ++k) {
        m[r][k] -= f * m[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

}  // namespace

LatticeBasis LatticeBasis::from_doubles(const std::vector<std::vector<double>>& rows) {
  LatticeBasis b;
  for (const auto& r : rows) {
    Vec v;
    for (double x : r) v.emplace_back(x);
    b.vectors.push_back(std::move(v));
  }
  return b;
}

LllResult lll_reduce(const LatticeBasis& basis, double delta) {
  const std::size_t d = basis.rank();
  if (d == 0) throw std::invalid_argument("empty lattice basis");
  for (const auto& v : basis.vectors)
    if (v.size() != basis.dim()) throw std::invalid_argument("ragged lattice basis");
  LllResult res;
  auto& b = res.reduced.vectors;
  b = basis.vectors;
  res.transform = Matrix<Real>::identity(d);
  auto& u = res.transform;
  GramSchmidt gs = gram_schmidt(b);

  std::size_t k = 1;
  while (k < d) {
    for (std::size_t jj = k; jj-- > 0;) {
      const Real q = boost::multiprecision::round(gs.mu[k][jj]);
      if (q == 0) continue;
      for (std::size_t c = 0; c < b[k].size(); ++c) b[k][c] -= q * b[jj][c];
      for (std::size_t c = 0; c < d; ++c) u(k, c) -= q * u(jj, c);
      for (std::size_t l = 0; l < jj; ++l) gs.mu[k][l] -= q * gs.mu[jj][l];
      gs.mu[k][jj] -= q;
    }
    if (gs.b[k] < (Real(delta) - gs.mu[k][k - 1] * gs.mu[k][k - 1]) * gs.b[k - 1]) {
      std::swap(b[k], b[k - 1]);
      for (std::size_t c = 0; c < d; ++c) std::swap(u(k, c), u(k - 1, c));
      gs = gram_schmidt(b);
      ++res.swaps;
      k = std::max<std::size_t>(k - 1, 1);
    } else {
      ++k;
    }
  }
  return res;
}

SvpResult shortest_vector(const LatticeBasis& basis, double coeff_bound, NormKind kind, std::uint64_t box_cap) {
  if (!(coeff_bound >= 1)) throw std::invalid_argument("coeff_bound must be >= 1");
  const LllResult lll = lll_reduce(basis);
  const auto& red = lll.reduced.vectors;
  const std::size_t d = red.size();
  const std::size_t dim = basis.dim();
  const GramSchmidt gs = gram_schmidt(red);

  SvpResult res;
  res.method = "enumeration";
  std::vector<long long> best_red;
  Real best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d; ++i) {
    const Real nv = norm_of(red[i], kind);
    if (nv < best) {
      best = nv;
      best_red.assign(d, 0);
      best_red[i] = 1;
    }
  }

  // Schnorr-Euchner enumeration on the reduced basis. Pruning runs in double
  // with a small inflation; candidate norms are recomputed in Real.
  std::vector<std::vector<double>> mu(d, std::vector<double>(d, 0.0));
  std::vector<double> bn(d);
  for (std::size_t i = 0; i < d; ++i) {
    bn[i] = to_double(gs.b[i]);
    for (std::size_t j = 0; j < i; ++j) mu[i][j] = to_double(gs.mu[i][j]);
  }
  auto radius2 = [&] {
    const double r = to_double(best);
    const double e2 = kind == NormKind::euclidean ? r * r : r * r * static_cast<double>(dim);
    return e2 * (1 + 1e-9);
  };
  double r2 = radius2();
  std::vector<long long> x(d, 0);
  std::vector<double> centre(d, 0.0);
  std::vector<double> partial(d + 1, 0.0);

  Vec cand(dim);
  auto visit_leaf = [&] {
    bool nonzero = false;
    for (long long v : x) nonzero = nonzero || v != 0;
    if (!nonzero) return;
    for (std::size_t c = 0; c < dim; ++c) {
      cand[c] = 0;
      for (std::size_t i = 0; i < d; ++i)
        if (x[i]) cand[c] += Real(x[i]) * red[i][c];
    }
    const Real nv = norm_of(cand, kind);
    if (nv < best) {
      best = nv;
      best_red = x;
      r2 = radius2();
    }
  };

  const std::uint64_t node_cap = 200'000'000;
  auto recurse = [&](auto&& self, std::size_t level) -> void {
    if (++res.nodes > node_cap) throw std::length_error("shortest_vector enumeration exceeded its node budget");
    double c = 0.0;
    for (std::size_t j = level + 1; j < d; ++j) c -= static_cast<double>(x[j]) * mu[j][level];
    centre[level] = c;
    const double room = r2 - partial[level + 1];
    if (room < 0) return;
    const double half = std::sqrt(room / bn[level]);
    const long long lo = static_cast<long long>(std::ceil(c - half));
    const long long hi = static_cast<long long>(std::floor(c + half));
    for (long long v = lo; v <= hi; ++v) {
      const double diff = static_cast<double>(v) - c;
      const double p = partial[level + 1] + diff * diff * bn[level];
      if (p > r2) continue;
      x[level] = v;
      partial[level] = p;
      if (level == 0)
        visit_leaf();
      else
        self(self, level - 1);
    }
    x[level] = 0;
  };
  recurse(recurse, d - 1);

  // Coefficients in the input basis, and the dual-basis box bound.
  std::vector<Vec> gram(d, Vec(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) gram[i][j] = dot(red[i], red[j]);
  const auto ginv = invert(gram);
  std::vector<Vec> dual(d, Vec(dim, Real(0)));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t c = 0; c < dim; ++c) dual[i][c] += ginv[i][j] * red[j][c];
  // transform T: red = T * input, so input coefficients c = c_red * T and
  // the dual vector for input row j is sum_i T(i, j) dual_i.
  const Real euclid_bound = kind == NormKind::euclidean ? best : best * boost::multiprecision::sqrt(Real(dim));
  double required = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    Vec dj(dim, Real(0));
    for (std::size_t i = 0; i < d; ++i)
      if (lll.transform(i, j) != 0)
        for (std::size_t c = 0; c < dim; ++c) dj[c] += lll.transform(i, j) * dual[i][c];
    required = std::max(required, to_double(boost::multiprecision::sqrt(dot(dj, dj)) * euclid_bound));
  }
  res.required_bound = required;

  auto fill_vector = [&](const std::vector<Real>& coeffs_input) {
    res.coeffs.assign(d, 0);
    res.vector.assign(dim, Real(0));
    for (std::size_t j = 0; j < d; ++j) {
      if (boost::multiprecision::abs(coeffs_input[j]) > Real(9.0e18))
        res.coeffs_overflow = true;
      else
        res.coeffs[j] = static_cast<long long>(coeffs_input[j]);
      for (std::size_t c = 0; c < dim; ++c) res.vector[c] += coeffs_input[j] * basis.vectors[j][c];
    }
    res.norm = norm_of(res.vector, kind);
  };

  if (required <= coeff_bound) {
    std::vector<Real> ci(d, Real(0));
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t i = 0; i < d; ++i) ci[j] += Real(best_red[i]) * lll.transform(i, j);
    fill_vector(ci);
    res.certified = true;
    return res;
  }

  // The box does not provably contain a shortest vector: scan it directly.
  const long long m = static_cast<long long>(std::floor(coeff_bound));
  const double points = std::pow(2.0 * m + 1, static_cast<double>(d));
  if (points > static_cast<double>(box_cap)) throw std::length_error("coefficient box exceeds the scan cap");
  res.method = "box";
  res.certified = false;
  std::vector<long long> c(d, -m);
  Real box_best = std::numeric_limits<double>::infinity();
  std::vector<long long> box_arg;
  Vec v(dim);
  for (;;) {
    bool nonzero = false;
    for (long long ci : c) nonzero = nonzero || ci != 0;
    if (nonzero) {
      ++res.nodes;
      for (std::size_t k = 0; k < dim; ++k) {
        v[k] = 0;
        for (std::size_t j = 0; j < d; ++j)
          if (c[j]) v[k] += Real(c[j]) * basis.vectors[j][k];
      }
      const Real nv = norm_of(v, kind);
      if (nv < box_best) {
        box_best = nv;
        box_arg = c;
      }
    }
    std::size_t k = 0;
    while (k < d && ++c[k] > m) c[k++] = -m;
    if (k == d) break;
  }
  std::vector<Real> ci(box_arg.begin(), box_arg.end());
  fill_vector(ci);
  return res;
}

}  // namespace qkg
