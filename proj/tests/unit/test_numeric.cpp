#include <qkg/numeric.hpp>
#include <qkg/subspace.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace qkg;

TEST(Entry, ParsesDecimalsExactly) {
  const Entry e = parse_entry("0.1");
  ASSERT_TRUE(e.is_exact());
  EXPECT_EQ(*e.exact(), Rational(1, 10));
}

TEST(Entry, ParsesRationalsAndSymbols) {
  EXPECT_EQ(*parse_entry("-3/7").exact(), Rational(-3, 7));
  EXPECT_FALSE(parse_entry("sqrt2").is_exact());
  EXPECT_NEAR(parse_entry("sqrt2-1").approx(), std::sqrt(2.0) - 1, 1e-15);
  EXPECT_NEAR(parse_entry("(sqrt5+1)/2").approx(), parse_entry("phi").approx(), 1e-15);
  EXPECT_NEAR(parse_entry("1e-3").approx(), 1e-3, 1e-18);
}

TEST(Entry, RejectsGarbage) {
  EXPECT_THROW(parse_entry("abc"), ParseError);
  EXPECT_THROW(parse_entry("1/0"), std::exception);
  EXPECT_THROW(parse_entry("2+"), ParseError);
}

TEST(Entry, SymbolicValuesCarryWorkingPrecision) {
  set_working_digits(60);
  const Real s2 = parse_entry("sqrt2").value();
  EXPECT_LT(boost::multiprecision::abs(s2 * s2 - 2), Real("1e-55"));
}

TEST(LinearForm, DecidesRationalZerosExactly) {
  // 1/3 + 1/3 * z0 - 2/3 * z1 at (1, 1) is exactly 0.
  LinearForm f(Entry(Rational(1, 3)), {Entry(Rational(1, 3)), Entry(Rational(-2, 3))});
  const long long z[] = {1, 1};
  const Residual r = f.nearest(z);
  EXPECT_TRUE(r.zero);
  EXPECT_TRUE(r.exact);
}

TEST(LinearForm, ResolvesTinyIrrationalResiduals) {
  set_working_digits(60);
  // Fibonacci convergent of phi: 6765 phi - 10946 is about 3e-5 and far
  // above double noise; the nearest integer and sign must come out right.
  LinearForm f(Entry(Rational(0)), {parse_entry("phi")});
  const long long z[] = {6765};
  const Residual r = f.nearest(z);
  EXPECT_FALSE(r.zero);
  EXPECT_EQ(r.nearest, 10946);
  const double phi = (1 + std::sqrt(5.0)) / 2;
  EXPECT_NEAR(r.value, 6765 * phi - 10946, 1e-12);
}

TEST(LinearForm, NearestIsWithinHalf) {
  LinearForm f(parse_entry("sqrt3"), {parse_entry("sqrt2"), parse_entry("0.3")});
  for (long long a = -20; a <= 20; ++a)
    for (long long b = -20; b <= 20; ++b) {
      const long long z[] = {a, b};
      const Residual r = f.nearest(z);
      EXPECT_LE(std::abs(r.value), 0.5 + 1e-15);
      const double direct = std::sqrt(3.0) + a * std::sqrt(2.0) + 0.3 * b;
      EXPECT_NEAR(r.value, direct - static_cast<double>(r.nearest), 1e-12);
    }
}
