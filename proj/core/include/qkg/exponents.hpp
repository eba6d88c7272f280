#pragma once

#include "qkg/subspace.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qkg {

using EntryMatrix = std::vector<std::vector<Entry>>;

struct ExponentWitness {
  std::vector<long long> vector;  // q for omega, coefficients of w for omega_j
  double exponent = 0.0;          // achieved exponent measured at the search bound
  double raw_exponent = 0.0;      // measured at the witness's own size
  double residual = 0.0;          // ||Aq + p|| or ||R_A c(w)||
  long long size = 0;             // ||q|| or ||pi_bullet(w)||
};

// Bounded-search estimate of a Diophantine exponent.
//
// `value` is the scale exponent: with d_min the best approximation over the
// search range and B the bound, value = -log(d_min)/log(B) (turned into the
// v of the definition for omega_j). It is what a finite search can say about
// the supremum; `raw_sup` keeps the literal max of -log d(q)/log ||q||, which
// is dominated by tiny q.
struct ExponentEstimate {
  bool infinite = false;
  bool infinite_exact = false;  // decided in rational arithmetic
  double value = 0.0;
  double raw_sup = 0.0;
  long long search_bound = 0;
  std::size_t examined = 0;
  bool capped = false;  // enumeration cap reached before the box was covered
  std::vector<ExponentWitness> witnesses;  // sorted by exponent, decreasing
};

// omega(A) for an m x n matrix: searches 1 <= ||q||_inf <= Q.
ExponentEstimate omega(const EntryMatrix& a, long long q_bound, std::size_t keep = 8);

struct MultivectorSearch {
  long long height = 20;
  std::uint64_t cap = 50'000'000;  // maximum coefficient tuples per grade
  std::size_t keep = 8;
};

// omega_j(A) for the (s+1) x (n-s) matrix of H over w in wedge^j(Z^{n+1})
// with coefficients in [-height, height].
ExponentEstimate omega_j(const AffineSubspace& h, int j, const MultivectorSearch& search);

struct GradeProfile {
  int grade = 0;
  // min ||R_A c(w)|| over enumerated w, indexed by ||pi_bullet(w)|| (index 0:
  // pi_bullet(w) = 0).
  std::vector<double> min_residual_by_size;
  std::size_t examined = 0;
  bool capped = false;
};

struct OmegaJResult {
  ExponentEstimate estimate;
  GradeProfile profile;
};
OmegaJResult omega_j_profile(const AffineSubspace& h, int j, const MultivectorSearch& search);

struct K3Exception {
  std::vector<long long> coefficients;
  double residual = 0.0;
  int grade = 0;
};

struct ExponentConditionReport {
  int s = 0;
  int n = 0;
  long long q_bound = 0;
  long long height = 0;
  std::vector<ExponentEstimate> per_j;  // index j-1
  std::vector<std::optional<double>> margins;  // n - estimate; empty when infinite
  ExponentEstimate omega_direct;        // omega(A, Q), equal to omega_1 in the limit
  std::string verdict;                  // pass | fail | inconclusive
  std::string explanation;
  double empirical_theta = 0.0;
  double empirical_k4 = 0.0;
  double empirical_k3 = 0.0;
  bool theta_grid_empty = false;
  std::vector<K3Exception> k3_exceptions;
  std::size_t k3_examined = 0;
  bool k3_capped = false;
};

ExponentConditionReport check_condition(const AffineSubspace& h, long long q_bound, const MultivectorSearch& search);

// (theta, K4) fit over recorded grade profiles; theta swept over 0.1 steps up
// to n - max_omega.
struct ThetaFit {
  double theta = 0.0;
  double k4 = 0.0;
  bool grid_empty = false;
};
ThetaFit fit_theta_k4(int n, double max_omega, const std::vector<GradeProfile>& profiles);

// Residual norm ||R_A c(w)|| (sup over blocks and coefficients) for integer w
// of the given grade, and ||pi_bullet(w)||_inf.
struct RcEvaluation {
  double residual = 0.0;
  bool zero = false;
  bool exact = false;
  long long bullet = 0;
};

class RcEvaluator {
 public:
  RcEvaluator(const AffineSubspace& h, int grade);
  int grade() const { return grade_; }
  std::size_t coefficient_count() const { return blades_.size(); }
  const std::vector<std::uint64_t>& blades() const { return blades_; }
  RcEvaluation evaluate(std::span<const long long> coeffs) const;

 private:
  // One coefficient of R_A c(w): block row `row`, arguments
  // (c(w)_row,J, c(w)_{s+1},J, ..., c(w)_n,J) as (blade index or -1, sign).
  struct Slot {
    int row;
    std::vector<std::pair<int, int>> args;
  };
  int s_;
  int n_;
  int grade_;
  std::vector<std::uint64_t> blades_;
  std::vector<int> bullet_index_;
  std::vector<LinearForm> rows_;  // 1*c_row + sum_l A[row][l] c_{s+1+l}
  std::vector<Slot> slots_;
};

struct HyperplaneViolation {
  long long q = 0;
  double max_distance = 0.0;
  double threshold = 0.0;
};

struct HyperplaneReport {
  long long q_bound = 0;
  double delta = 0.0;
  std::vector<HyperplaneViolation> violations;
  std::string verdict;  // pass | pass-with-exceptions | fail
};

// max_i |p_i + a_i q| > |q|^{-n+delta} for 0 < q <= Q with nearest p_i.
// "pass-with-exceptions": violations exist but none in the upper half of
// the range.
HyperplaneReport hyperplane_check(const std::vector<Entry>& a, double delta, long long q_bound);

}  // namespace qkg
