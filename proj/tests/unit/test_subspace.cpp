#include <qkg/subspace.hpp>

#include <gtest/gtest.h>

#include "test_random.hpp"

using namespace qkg;

namespace {

AffineSubspace rational_subspace(fixtures::Rng& rng, int s, int n) {
  std::vector<Entry> a0;
  for (int j = 0; j < n - s; ++j) a0.emplace_back(rng.rational());
  std::vector<std::vector<Entry>> ap(s);
  for (auto& row : ap)
    for (int j = 0; j < n - s; ++j) row.emplace_back(rng.rational());
  return AffineSubspace(s, n, a0, ap);
}

}  // namespace

TEST(AffineSubspace, ParametrizeExamples) {
  const AffineSubspace zero(1, 2, {Entry::from_int(0)}, {{Entry::from_int(0)}});
  const Rational five[] = {Rational(5)};
  EXPECT_EQ(zero.parametrize<Rational>(five), (std::vector<Rational>{5, 0}));

  const AffineSubspace h(1, 2, {Entry::from_int(1)}, {{Entry::from_int(2)}});
  const Rational three[] = {Rational(3)};
  EXPECT_EQ(h.parametrize<Rational>(three), (std::vector<Rational>{3, 7}));
  const Rational origin[] = {Rational(0)};
  EXPECT_EQ(h.parametrize<Rational>(origin), (std::vector<Rational>{0, 1}));
}

TEST(AffineSubspace, Matrices) {
  const AffineSubspace h(1, 2, {Entry::from_int(1)}, {{Entry::from_int(2)}});
  const auto g = h.gradient_matrix<Rational>();
  EXPECT_EQ(g(0, 0), 1);
  EXPECT_EQ(g(0, 1), 2);
  const auto r = h.r_matrix<Rational>();
  EXPECT_EQ(r(0, 0), 1);
  EXPECT_EQ(r(0, 1), 0);
  EXPECT_EQ(r(0, 2), 1);
  EXPECT_EQ(r(1, 0), 0);
  EXPECT_EQ(r(1, 1), 1);
  EXPECT_EQ(r(1, 2), 2);
}

TEST(AffineSubspace, ParametrizeAgreesWithRMatrix) {
  fixtures::Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const int s = static_cast<int>(rng.integer(1, 3));
    const int n = s + static_cast<int>(rng.integer(1, 3));
    const AffineSubspace h = rational_subspace(rng, s, n);
    const auto x = rng.rationals(s);
    const auto p = h.parametrize<Rational>(x);
    const auto r = h.r_matrix<Rational>();
    std::vector<Rational> xt{Rational(1)};
    xt.insert(xt.end(), x.begin(), x.end());
    for (int c = 0; c < n; ++c) {
      Rational v(0);
      for (int i = 0; i <= s; ++i) v += xt[i] * r(i, c + 1);
      EXPECT_EQ(v, p[c]);
    }
  }
}

TEST(AffineSubspace, GradientMatchesFiniteDifferences) {
  const AffineSubspace h(2, 4, {parse_entry("sqrt2"), parse_entry("0.5")},
                         {{parse_entry("sqrt3"), parse_entry("-1/3")}, {parse_entry("phi"), parse_entry("2")}});
  const auto g = h.gradient_matrix<double>();
  const std::vector<double> q{3, -1, 2, 5};
  const double x0[] = {0.2, -0.4};
  auto phi = [&](const double* x) {
    const auto p = h.parametrize<double>(std::span<const double>(x, 2));
    double v = 0;
    for (int i = 0; i < 4; ++i) v += p[i] * q[i];
    return v;
  };
  for (int i = 0; i < 2; ++i) {
    double xp[] = {x0[0], x0[1]};
    double xm[] = {x0[0], x0[1]};
    xp[i] += 1e-6;
    xm[i] -= 1e-6;
    double expect = 0;
    for (int c = 0; c < 4; ++c) expect += g(i, c) * q[c];
    EXPECT_NEAR((phi(xp) - phi(xm)) / 2e-6, expect, 1e-6);
  }
}

TEST(AffineSubspace, RejectsBadShapes) {
  EXPECT_THROW(AffineSubspace(2, 2, {}, {{}, {}}), std::invalid_argument);
  EXPECT_THROW(AffineSubspace(1, 2, {Entry::from_int(0), Entry::from_int(0)}, {{Entry::from_int(0)}}),
               std::invalid_argument);
}

TEST(Ball, VolumesAndMembership) {
  EXPECT_DOUBLE_EQ(unit_ball_volume(1), 2.0);
  EXPECT_NEAR(unit_ball_volume(2), M_PI, 1e-15);
  EXPECT_NEAR(unit_ball_volume(3), 4 * M_PI / 3, 1e-14);
  const Ball b({0.0}, 0.5);
  EXPECT_DOUBLE_EQ(b.volume(), 1.0);
  const double inside[] = {0.49};
  const double edge[] = {0.5};
  EXPECT_TRUE(b.contains(inside));
  EXPECT_FALSE(b.contains(edge));
}

TEST(FormAt, MatchesParametrization) {
  const AffineSubspace h(1, 2, {parse_entry("sqrt2-1")}, {{parse_entry("sqrt3-1")}});
  const double x[] = {0.125};
  const long long q[] = {4, -7};
  const auto p = h.parametrize<double>(x);
  const Residual r = h.form_at(x).value(q);
  EXPECT_NEAR(r.value, 4 * p[0] - 7 * p[1], 1e-13);
}
