#pragma once

#include "qkg/exterior.hpp"
#include "qkg/goodness.hpp"
#include "qkg/lattice.hpp"
#include "qkg/sampling.hpp"
#include "qkg/subspace.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qkg {

// (t, kappa, r, beta) and the derived scales delta, K, T, eps', eps.
struct FlowParameters {
  int s = 1;
  int n = 2;
  int t = 0;
  Real kappa;
  double r = 0.5;
  double beta = 0.0;
  Real delta;
  Real k_grad;
  Real T;
  Real eps_prime;
  Real eps;

  static FlowParameters make(int s, int n, int t, const Real& kappa, double r, double beta);

  // Diagonal entries of g_t.
  Real g_origin() const { return eps / delta; }
  Real g_star() const { return eps / k_grad; }
  Real g_coord() const { return eps / T; }
};

// u_x on W = R^{1+s+n}; column blocks of widths 1, s, s, n-s.
template <class T>
Matrix<T> u_matrix(const AffineSubspace& h, std::span<const T> x) {
  const int s = h.s();
  const int n = h.n();
  if (static_cast<int>(x.size()) != s) throw std::invalid_argument("u_matrix: point has the wrong dimension");
  const int d = 1 + s + n;
  Matrix<T> u = Matrix<T>::identity(d);
  for (int i = 0; i < s; ++i) u(0, 1 + s + i) = x[i];
  for (int l = 0; l < h.codim(); ++l) {
    T v = entry_as<T>(h.a(0, l));
    for (int i = 0; i < s; ++i) v += x[i] * entry_as<T>(h.a(i + 1, l));
    u(0, 1 + 2 * s + l) = v;
  }
  for (int i = 0; i < s; ++i) {
    u(1 + i, 1 + s + i) = T(1);
    for (int l = 0; l < h.codim(); ++l) u(1 + i, 1 + 2 * s + l) = entry_as<T>(h.a(i + 1, l));
  }
  return u;
}

// diag(a, b (s times), c (n times)).
template <class T>
Matrix<T> scale_matrix(int s, int n, const T& a, const T& b, const T& c) {
  Matrix<T> g(1 + s + n, 1 + s + n);
  g(0, 0) = a;
  for (int i = 0; i < s; ++i) g(1 + i, 1 + i) = b;
  for (int i = 0; i < n; ++i) g(1 + s + i, 1 + s + i) = c;
  return g;
}

Matrix<Real> g_matrix(const FlowParameters& p);
// H(x) = g_t u_x at working precision.
Matrix<Real> h_matrix(const AffineSubspace& h, std::span<const double> x, const FlowParameters& p);

// Generators e0, e1, ..., en of Lambda in the ambient frame.
SubgroupBasis lambda_basis(int s, int n);
// Ambient-frame copy of a subgroup given in Lambda coordinates (p, q).
SubgroupBasis embed_in_ambient(int s, int n, const std::vector<std::vector<long long>>& lattice_vectors);

struct BasisActionResult {
  bool origin = false;  // H e0 = a e0
  bool star = false;    // H e*_i = b e*_i
  bool coord = false;   // H e_i = a f_i e0 + b sum_j G_{ji} e*_j + c e_i, G = [I A']
  bool det_one = false;
  bool all() const { return origin && star && coord && det_one; }
};

// Exact check of the three basis-action formulas for g = diag(a, b.., c..)
// and det(u_x) = 1; rational data only.
BasisActionResult basis_action_check(const AffineSubspace& h, std::span<const Rational> x, const Rational& a,
                                     const Rational& b, const Rational& c);

struct AtWitness {
  long long p = 0;
  std::vector<long long> q;
  double residual = 0.0;      // |p + (x, x~A) q|
  double gradient = 0.0;      // ||[I A'] q||_inf
  bool residual_exact = false;
};

// Searches 2^t <= ||q||_inf < 2^{t+1} with the nearest p for
// |p + (x, x~A) q| < kappa/2^{nt} and ||[I A'] q||_inf < sqrt(ns/(2r^2)) 2^{t/2}.
std::optional<AtWitness> in_A_t(const AffineSubspace& h, std::span<const double> x, int t, const Real& kappa,
                                double r);

struct TildeWitness {
  long long p = 0;
  std::vector<long long> q;
  double norm = 0.0;  // ||H(x) lambda||_inf
};

// lambda in Lambda \ {0} with ||H(x) lambda||_inf < threshold (default eps).
// The box |p + y.q| < threshold delta/eps, ||[I A']q|| < threshold K/eps,
// ||q|| < threshold T/eps is exactly the preimage of the sup-norm ball, so
// the scan is exhaustive.
std::optional<TildeWitness> in_A_tilde(const AffineSubspace& h, std::span<const double> x, const FlowParameters& p,
                                       std::optional<double> threshold = std::nullopt);

// Rows: H(x) e0, H(x) e1, ..., H(x) en.
LatticeBasis orbit_lattice_basis(const AffineSubspace& h, std::span<const double> x, const FlowParameters& p);
// Shortest vector of H(x) Lambda in the given norm.
SvpResult orbit_shortest_vector(const AffineSubspace& h, std::span<const double> x, const FlowParameters& p,
                                NormKind kind);

// Rank-k primitive subgroups of Z^{dim}, one row-Hermite basis each, with
// entries bounded by `height`. Throws std::length_error above `cap` outputs.
std::vector<std::vector<std::vector<long long>>> primitive_hnf_bases(int dim, int k, long long height,
                                                                    std::size_t cap = 2'000'000);
// Same, for Lambda = Z^{n+1} embedded in the ambient frame.
std::vector<SubgroupBasis> enumerate_primitive_subgroups(int s, int n, int k, long long height,
                                                         std::size_t cap = 2'000'000);

// nu(H(x) Gamma) by direct push-forward.
double nu_orbit(const AffineSubspace& h, std::span<const double> x, const FlowParameters& p,
                const SubgroupBasis& gamma);

// x -> H(x) w for a fixed Gamma: u_x is affine in x with only the first row
// moving, so u_x w = P0 + sum_i x_i P_i. Coefficients are computed once at
// working precision; only blades surviving pi_* are kept.
class NuOrbit {
 public:
  NuOrbit(const AffineSubspace& h, const SubgroupBasis& gamma);

  int grade() const { return grade_; }
  // Binds the g_t scaling; values are then evaluated in double.
  void bind(const FlowParameters& p);
  double operator()(std::span<const double> x) const;
  // Sup over a set of points (max over extreme points for s = 1 grids).
  double sup_over(const SamplePoints& pts) const;
  // ||pi_*(H(x) w)||_inf.
  double sup_norm_at(std::span<const double> x) const;

 private:
  int s_;
  int grade_;
  std::vector<Blade> blades_;
  std::vector<Real> p0_;
  std::vector<std::vector<Real>> pi_;  // pi_[i][b]
  std::vector<double> c0_;             // bound and scaled
  std::vector<std::vector<double>> ci_;
};

struct Km1Report {
  std::size_t checked = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t inconclusive = 0;
  double min_ratio = 1.0;  // min ||pi_* H w||_inf / nu over grid samples
  double max_ratio = 0.0;
  double ratio_lower = 0.0;
  bool ratio_ok = false;
  double worst_good_ratio = 0.0;
  std::string verdict;
};

// check_good with (C, alpha) on x -> nu(H(x) Gamma) for every given Gamma,
// plus the sup/Euclidean ratio bounds used to transfer goodness to nu.
Km1Report verify_km1(const AffineSubspace& h, const Ball& u, const FlowParameters& p,
                     const std::vector<SubgroupBasis>& subgroups, double c, double alpha,
                     std::span<const double> eps_fractions, int per_axis);

struct Km2Bounds {
  double top = 0.5;     // rank n+1
  double middle = 0.0;  // ranks n-s+1..n
  double low = 0.0;     // ranks 1..n-s
  double rho = 0.0;
};

struct Km2RankRow {
  int t = 0;
  int rank = 0;
  std::size_t subgroups = 0;
  double min_sup = 0.0;
  double bound = 0.0;
  bool ok = false;
  std::vector<std::vector<long long>> worst;  // Lambda coordinates
};

struct Km2Report {
  std::vector<Km2RankRow> rows;
  double empirical_rho = 0.0;
  double rho = 0.0;
  int worst_t = 0;
  std::vector<std::vector<long long>> worst;
  std::size_t subgroups = 0;
  bool passed = false;
};

// For each t and rank, min over enumerated Gamma of the grid sup of
// nu(H(x) Gamma), compared with the rank bounds and with rho.
Km2Report verify_km2(const AffineSubspace& h, const Ball& u, const Real& kappa, double beta,
                     std::span<const int> ts, int per_axis, long long height, const Km2Bounds& bounds,
                     std::size_t cap = 2'000'000);

struct TildeBound {
  double direct = 0.0;    // grid sup of ||g~ u~_x w||_inf
  double rc_term = 0.0;   // (eps^k/(delta T^{k-1})) sup_x ||x~ R_A c(w)||_inf
  double pi_term = 0.0;   // (eps/T)^k ||pi(w)||_inf
  double max_term = 0.0;
  double bound = 0.0;     // max_term / 2^{(n+1)/2}
  double k2_bound = 0.0;  // (eps^k/(delta T^{k-1})) K2 ||R_A c(w)|| / 2^{(n+1)/2}
};

// w in the lattice frame W_{0->n}, grade 1..n.
TildeBound tilde_lower_bound(const AffineSubspace& h, const Ball& u, const FlowParameters& p,
                             const Multivector<Rational>& w, double k2, int per_axis);

// k (3^s N_s)^k C (eps''/rho)^alpha |B|.
double nondivergence_rhs(double c, double alpha, double rho, double eps2, int k, int s, double ns,
                         double ball_measure);

struct NondivRow {
  int t = 0;
  double eps2 = 0.0;
  double measured = 0.0;
  double rhs = 0.0;
  bool ok = false;
};

struct NondivReport {
  std::vector<NondivRow> rows;
  std::size_t points = 0;
  std::size_t uncertified = 0;
  bool passed = false;
};

struct NondivRequest {
  Real kappa;
  double beta = 0.0;
  std::vector<int> ts;
  std::vector<double> eps2;
  int per_axis = 201;
  double c = 1.0;
  double alpha = 1.0;
  double rho = 0.5;
  double ns = 2.0;
};

// Grid measure of {x in U : nu(H(x) lambda) < eps'' for some lambda} via the
// Euclidean shortest vector of H(x) Lambda.
NondivReport nondivergence_sweep(const AffineSubspace& h, const Ball& u, const NondivRequest& req);

struct ATildeMeasurement {
  int t = 0;
  std::size_t points = 0;
  std::size_t members = 0;     // in A~_t
  std::size_t members_at = 0;  // in A_t (when measured)
  bool at_measured = false;
  double measured = 0.0;       // |A~_t| estimate
  double measured_at = 0.0;
  double bound = 0.0;          // K0 kappa^{1/(s(n+1))} 2^{-ct} |U|
  bool inclusion_ok = true;    // every A_t point is in A~_t
  bool ok = false;             // measured <= bound
};

ATildeMeasurement measure_A_tilde(const AffineSubspace& h, const Ball& u, const FlowParameters& p,
                                  const SamplePoints& pts, double k0, bool with_at);

}  // namespace qkg
