#include "qkg/numeric.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qkg {

namespace {
unsigned g_digits = 60;
constexpr double kUnit = std::numeric_limits<double>::epsilon();
}  // namespace

void set_working_digits(unsigned digits10) {
  if (digits10 < 20) throw std::invalid_argument("working precision must be at least 20 digits");
  g_digits = digits10;
  Real::default_precision(digits10);
}

unsigned working_digits() { return g_digits; }

namespace {
struct PrecisionInit {
  PrecisionInit() { Real::default_precision(g_digits); }
} const g_precision_init;
}  // namespace

Real to_real(const Rational& q) { return Real(q); }

double to_double(const Rational& q) { return q.convert_to<double>(); }

double to_double(const Real& x) { return x.convert_to<double>(); }

Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw std::domain_error("non-finite value has no rational form");
  return Rational(x);
}

Entry::Entry(const Rational& q) : value_(to_real(q)), exact_(q), approx_(to_double(q)) {}

Entry::Entry(const Real& x) : value_(x), approx_(to_double(x)) {}

Entry operator+(const Entry& a, const Entry& b) {
  if (a.exact_ && b.exact_) return Entry(Rational(*a.exact_ + *b.exact_));
  return Entry(Real(a.value_ + b.value_));
}

Entry operator-(const Entry& a, const Entry& b) {
  if (a.exact_ && b.exact_) return Entry(Rational(*a.exact_ - *b.exact_));
  return Entry(Real(a.value_ - b.value_));
}

Entry operator*(const Entry& a, const Entry& b) {
  if (a.exact_ && b.exact_) return Entry(Rational(*a.exact_ * *b.exact_));
  return Entry(Real(a.value_ * b.value_));
}

Entry operator/(const Entry& a, const Entry& b) {
  if (b.exact_ ? *b.exact_ == 0 : b.value_ == 0) throw std::domain_error("division by zero");
  if (a.exact_ && b.exact_) return Entry(Rational(*a.exact_ / *b.exact_));
  return Entry(Real(a.value_ / b.value_));
}

Entry Entry::operator-() const {
  if (exact_) return Entry(Rational(-*exact_));
  return Entry(Real(-value_));
}

LinearForm::LinearForm(Entry constant, std::vector<Entry> coeffs)
    : constant_(std::move(constant)), coeffs_(std::move(coeffs)) {
  approx_.reserve(coeffs_.size());
  abs_approx_.reserve(coeffs_.size());
  for (const auto& c : coeffs_) {
    approx_.push_back(c.approx());
    abs_approx_.push_back(std::abs(c.approx()));
    exact_ = exact_ && c.is_exact();
  }
  constant_approx_ = constant_.approx();
  exact_ = exact_ && constant_.is_exact();
}

Residual LinearForm::value(std::span<const long long> z) const { return evaluate<false>(z); }

Residual LinearForm::nearest(std::span<const long long> z) const { return evaluate<true>(z); }

template <bool Reduce>
Residual LinearForm::evaluate(std::span<const long long> z) const {
  if (z.size() != coeffs_.size()) throw std::invalid_argument("linear form arity mismatch");

  double sum = constant_approx_;
  double scale = std::abs(constant_approx_);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double zi = static_cast<double>(z[i]);
    sum += approx_[i] * zi;
    scale += abs_approx_[i] * std::abs(zi);
  }
  // Coefficient conversion, products and the running sum each contribute at
  // most one unit of rounding relative to `scale`.
  const double guard = 4.0 * (static_cast<double>(z.size()) + 4.0) * kUnit * (scale + 1.0);

  Residual out;
  if constexpr (Reduce) {
    const double nearest = std::nearbyint(sum);
    const double r = sum - nearest;
    if (std::abs(r) > guard && std::abs(nearest) < 9.0e15) {
      out.value = r;
      out.nearest = static_cast<long long>(nearest);
      return out;
    }
  } else {
    if (std::abs(sum) > guard) {
      out.value = sum;
      return out;
    }
  }

  Real s = constant_.value();
  for (std::size_t i = 0; i < z.size(); ++i) s += coeffs_[i].value() * z[i];
  long long nearest = 0;
  if constexpr (Reduce) {
    const Real n = boost::multiprecision::round(s);
    nearest = n.convert_to<long long>();
    s -= n;
  }
  const double bits = static_cast<double>(working_digits()) * 3.3219280948873623;
  const Real zero_tol = Real(std::ldexp(1.0, -static_cast<int>(bits) + 24)) * Real(scale + 1.0);
  out.nearest = nearest;
  if (boost::multiprecision::abs(s) > zero_tol) {
    out.value = to_double(s);
    return out;
  }
  if (exact_) {
    Rational e = *constant_.exact();
    for (std::size_t i = 0; i < z.size(); ++i) e += *coeffs_[i].exact() * z[i];
    e -= nearest;
    out.exact = true;
    out.zero = (e == 0);
    out.value = to_double(e);
    return out;
  }
  out.zero = true;
  out.value = 0.0;
  return out;
}

template Residual LinearForm::evaluate<true>(std::span<const long long>) const;
template Residual LinearForm::evaluate<false>(std::span<const long long>) const;

}  // namespace qkg
