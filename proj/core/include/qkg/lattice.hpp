#pragma once

#include "qkg/matrix.hpp"
#include "qkg/numeric.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qkg {

// Lattice generated by the rows of `vectors` (all of the same length).
struct LatticeBasis {
  std::vector<std::vector<Real>> vectors;

  std::size_t rank() const { return vectors.size(); }
  std::size_t dim() const { return vectors.empty() ? 0 : vectors.front().size(); }
  static LatticeBasis from_doubles(const std::vector<std::vector<double>>& rows);
};

struct LllResult {
  LatticeBasis reduced;
  Matrix<Real> transform;  // reduced = transform * input, unimodular integer entries
  int swaps = 0;
};

// LLL with parameter delta; throws std::invalid_argument on dependent rows.
LllResult lll_reduce(const LatticeBasis& basis, double delta = 0.99);

enum class NormKind { euclidean, sup };

struct SvpResult {
  std::vector<long long> coeffs;  // w.r.t. the input basis
  std::vector<Real> vector;
  Real norm;
  bool certified = false;
  double required_bound = 0.0;    // coefficient box that provably holds every shortest vector
  bool coeffs_overflow = false;   // coefficients do not fit in long long
  std::string method;             // "enumeration" or "box"
  std::uint64_t nodes = 0;

  double norm_double() const { return to_double(norm); }
};

// Minimum of ||sum c_i b_i|| over integer c != 0 with |c_i| <= coeff_bound.
//
// The box needed to contain every shortest vector is bounded through the
// dual basis. When coeff_bound covers it, the minimum comes from
// Schnorr-Euchner enumeration on an LLL-reduced basis and is certified.
// Otherwise the box itself is scanned (cap on the number of points) and the
// result is flagged uncertified.
SvpResult shortest_vector(const LatticeBasis& basis, double coeff_bound, NormKind kind = NormKind::euclidean,
                          std::uint64_t box_cap = 50'000'000);

}  // namespace qkg
