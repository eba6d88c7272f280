#include <qkg/constants.hpp>
#include <qkg/goodness.hpp>

#include <gtest/gtest.h>

#include "test_random.hpp"

using namespace qkg;

TEST(Polynomial, Evaluation) {
  const Polynomial p(2, {{{1, 1}, 2.0}, {{0, 0}, -1.0}, {{2, 0}, 0.5}});
  const double x[] = {2.0, 3.0};
  EXPECT_DOUBLE_EQ(p(x), 2 * 6 - 1 + 0.5 * 4);
  EXPECT_EQ(p.degree(), 2);
  EXPECT_FALSE(p.is_affine());
  const auto u = Polynomial::univariate({1, 0, 3});
  EXPECT_EQ(u.univariate_coeffs(), (std::vector<double>{1, 0, 3}));
}

TEST(SupOnBall, Examples) {
  const auto x = GoodFunction::from_polynomial(Polynomial::affine(0, {1}));
  const auto s1 = sup_on_ball(x, Ball({0.0}, 1.0), 101);
  EXPECT_DOUBLE_EQ(s1.value, 1.0);
  EXPECT_TRUE(s1.exact);

  const auto f = GoodFunction::from_polynomial(Polynomial::affine(1, {2}));
  EXPECT_DOUBLE_EQ(sup_on_ball(f, Ball({3.0}, 0.5), 101).value, 8.0);

  const auto xy = GoodFunction::from_polynomial(Polynomial(2, {{{1, 1}, 1.0}}));
  const auto s2 = sup_on_ball(xy, Ball({0.0, 0.0}, 1.0), 101);
  EXPECT_FALSE(s2.exact);
  EXPECT_NEAR(s2.value, 0.5, 0.02);
  EXPECT_LE(s2.value, 0.5);
}

TEST(SupOnBall, CubicCriticalPoints) {
  // x^3 - x on [-1, 1]: interior extremum 2/(3 sqrt 3) at x = -1/sqrt 3.
  const auto f = GoodFunction::from_polynomial(Polynomial::univariate({0, -1, 0, 1}));
  const auto s = sup_on_ball(f, Ball({0.0}, 1.0), 11);
  EXPECT_TRUE(s.exact);
  EXPECT_NEAR(s.value, 2 / (3 * std::sqrt(3.0)), 1e-14);
}

TEST(SublevelMeasure, Examples) {
  const auto five = GoodFunction::from_polynomial(Polynomial::affine(5, {0}));
  EXPECT_DOUBLE_EQ(sublevel_measure(five, Ball({0.0}, 1.0), 1.0, 1001).measure, 0.0);

  const auto x = GoodFunction::from_polynomial(Polynomial::affine(0, {1}));
  const auto m = sublevel_measure(x, Ball({0.0}, 1.0), 0.5, 1000);
  EXPECT_NEAR(m.measure, 1.0, m.error_bound + 1e-12);
  EXPECT_LE(m.error_bound, 0.01);

  EXPECT_NEAR(sublevel_measure(x, Ball({0.0}, 1.0), 5.0, 1000).measure, 2.0, 1e-9);
}

TEST(CheckGood, LinearPassesWithLinearConstants) {
  fixtures::Rng rng(7);
  const auto gc = good_constant(1, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = GoodFunction::from_polynomial(Polynomial::affine(rng.uniform(-2, 2), {rng.uniform(-2, 2)}));
    const Ball b({rng.uniform(-1, 1)}, rng.uniform(0.1, 2));
    const double eps[] = {rng.uniform(1e-3, 1.0)};
    const auto r = check_good(f, gc.c, gc.alpha, b, eps);
    EXPECT_NE(r.verdict, "fail");
  }
}

TEST(CheckGood, QuadraticPassesWithDegreeTwoConstants) {
  const auto gc = good_constant(1, 2);
  const auto f = GoodFunction::from_polynomial(Polynomial::univariate({-0.25, 0, 1}));
  const double eps[] = {1e-3, 1e-2, 0.1, 0.2};
  EXPECT_EQ(check_good(f, gc.c, gc.alpha, Ball({0.1}, 0.7), eps).verdict, "pass");
}

TEST(CheckGood, TooSmallConstantFails) {
  const auto f = GoodFunction::from_polynomial(Polynomial::affine(0, {1}));
  const double eps[] = {0.5};
  EXPECT_EQ(check_good(f, 0.01, 1.0, Ball({0.0}, 1.0), eps).verdict, "fail");
}

TEST(CheckGood, ZeroFunctionSkipped) {
  const auto f = GoodFunction::from_polynomial(Polynomial::affine(0, {0}));
  const double eps[] = {0.5};
  const auto r = check_good(f, 4, 1, Ball({0.0}, 1.0), eps);
  EXPECT_EQ(r.verdict, "skipped");
  EXPECT_TRUE(r.zero_function);
}

TEST(CheckGood, PropertySuite) {
  const auto r = property_suite(2024, 30);
  EXPECT_TRUE(r.g1);
  EXPECT_TRUE(r.g2);
  EXPECT_TRUE(r.g3);
  EXPECT_TRUE(r.g4);
}
