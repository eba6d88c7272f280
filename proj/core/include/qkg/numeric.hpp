#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qkg {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;
using Real = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<0>,
    boost::multiprecision::et_off>;

// Precision (decimal digits) used for every Real created afterwards.
void set_working_digits(unsigned digits10);
unsigned working_digits();

Real to_real(const Rational& q);
double to_double(const Rational& q);
double to_double(const Real& x);
Rational exact_rational(double x);  // every finite double is a dyadic rational

// A scalar that always has a high-precision value and, when it is rational,
// also its exact value. Arithmetic keeps the exact part as long as both
// operands have one.
class Entry {
 public:
  Entry() : Entry(Rational(0)) {}
  explicit Entry(const Rational& q);
  explicit Entry(const Real& x);
  static Entry from_int(long long v) { return Entry(Rational(v)); }
  static Entry from_double(double d) { return Entry(exact_rational(d)); }

  const Real& value() const { return value_; }
  double approx() const { return approx_; }
  const std::optional<Rational>& exact() const { return exact_; }
  bool is_exact() const { return exact_.has_value(); }

  friend Entry operator+(const Entry& a, const Entry& b);
  friend Entry operator-(const Entry& a, const Entry& b);
  friend Entry operator*(const Entry& a, const Entry& b);
  friend Entry operator/(const Entry& a, const Entry& b);
  Entry operator-() const;

 private:
  Real value_;
  std::optional<Rational> exact_;
  double approx_ = 0.0;
};

// Result of evaluating c0 + sum a_i z_i for an integer vector z.
struct Residual {
  double value = 0.0;     // signed; when reduced, distance to nearest integer
  long long nearest = 0;  // the integer subtracted (0 when not reduced)
  bool zero = false;      // exactly zero (rational data) or zero to working precision
  bool exact = false;     // the zero decision was made in exact arithmetic
};

// c0 + sum a_i z_i with real coefficients and integer arguments.
//
// Evaluation runs in double with a forward error bound; only when the double
// result is within that bound of zero is it recomputed at working precision,
// and, for rational data, decided exactly. This keeps grid sweeps fast while
// still resolving residuals far below double resolution.
class LinearForm {
 public:
  LinearForm() = default;
  LinearForm(Entry constant, std::vector<Entry> coeffs);

  std::size_t arity() const { return coeffs_.size(); }
  const std::vector<Entry>& coeffs() const { return coeffs_; }
  const Entry& constant() const { return constant_; }
  bool is_exact() const { return exact_; }

  // Plain value of the form.
  Residual value(std::span<const long long> z) const;
  // Value minus its nearest integer; |value| <= 1/2.
  Residual nearest(std::span<const long long> z) const;

 private:
  template <bool Reduce>
  Residual evaluate(std::span<const long long> z) const;

  Entry constant_;
  std::vector<Entry> coeffs_;
  std::vector<double> approx_;
  std::vector<double> abs_approx_;
  double constant_approx_ = 0.0;
  bool exact_ = true;
};

inline long long round_half_away(double v) { return std::llround(v); }

}  // namespace qkg
