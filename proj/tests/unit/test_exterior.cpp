#include <qkg/exterior.hpp>

#include <gtest/gtest.h>

#include "test_random.hpp"

using namespace qkg;
using MV = Multivector<Rational>;
using L = BasisLabel;

namespace {

const Frame kLat2 = Frame::lattice(2);     // e0, e1, e2
const Frame kAmb12 = Frame::ambient(1, 2);  // e0, e*1, e1, e2
const Frame kAmb22 = Frame::ambient(2, 2);

MV vec(Frame f, std::vector<Rational> c) { return MV::vector(f, c); }

}  // namespace

TEST(Wedge, Antisymmetry) {
  const MV e0 = MV::basis(kLat2, L::e0());
  const MV e1 = MV::basis(kLat2, L::e(1));
  EXPECT_EQ(wedge(e1, e0), -wedge(e0, e1));
}

TEST(Wedge, SelfWedgeVanishes) {
  const MV a = vec(kLat2, {1, 1, 0});
  const MV e1 = MV::basis(kLat2, L::e(1));
  EXPECT_EQ(wedge(a, e1), MV::blade(kLat2, {L::e0(), L::e(1)}));
}

TEST(Wedge, ExpandsBilinearly) {
  const MV a = vec(kLat2, {2, 0, 3});
  const MV e1 = MV::basis(kLat2, L::e(1));
  const MV expect = MV::blade(kLat2, {L::e0(), L::e(1)}, Rational(2)) - MV::blade(kLat2, {L::e(1), L::e(2)}, Rational(3));
  EXPECT_EQ(wedge(a, e1), expect);
}

TEST(Wedge, GradeOverflowThrows) {
  const MV top = MV::blade(kLat2, {L::e0(), L::e(1), L::e(2)});
  EXPECT_THROW(wedge(top, MV::basis(kLat2, L::e0())), std::domain_error);
}

TEST(Represent, TrivialSubgroupIsOne) {
  const SubgroupBasis b{kLat2, {}};
  EXPECT_EQ(represent(b), MV::scalar(kLat2, Rational(1)));
}

TEST(Represent, RowReductionInvariant) {
  EXPECT_EQ(represent(SubgroupBasis{kLat2, {{1, 0, 0}, {0, 1, 0}}}), MV::blade(kLat2, {L::e0(), L::e(1)}));
  EXPECT_EQ(represent(SubgroupBasis{kLat2, {{1, 1, 0}, {0, 1, 0}}}), MV::blade(kLat2, {L::e0(), L::e(1)}));
  EXPECT_THROW(represent(SubgroupBasis{kLat2, {{1, 1, 0}, {2, 2, 0}}}), std::invalid_argument);
}

TEST(CMap, GradeOne) {
  const auto c = c_map(vec(kLat2, {2, 0, 3}));
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0], MV::scalar(kLat2, Rational(2)));
  EXPECT_TRUE(c[1].is_zero());
  EXPECT_EQ(c[2], MV::scalar(kLat2, Rational(3)));
}

TEST(CMap, GradeTwo) {
  const auto c = c_map(MV::blade(kLat2, {L::e(1), L::e(2)}));
  EXPECT_TRUE(c[0].is_zero());
  EXPECT_EQ(c[1], MV::basis(kLat2, L::e(2)));
  EXPECT_EQ(c[2], -MV::basis(kLat2, L::e(1)));

  const auto d = c_map(MV::blade(kLat2, {L::e0(), L::e(1)}));
  EXPECT_EQ(d[0], MV::basis(kLat2, L::e(1)));
  EXPECT_TRUE(d[1].is_zero());
  EXPECT_TRUE(d[2].is_zero());
}

TEST(Projections, Bullet) {
  EXPECT_TRUE(project_bullet(MV::blade(kLat2, {L::e0(), L::e(2)}), 1).is_zero());
  const MV five_e2 = MV::basis(kLat2, L::e(2), Rational(5));
  EXPECT_EQ(project_bullet(five_e2, 1), five_e2);
  const Frame f3 = Frame::lattice(3);
  const MV w = MV::blade(f3, {L::e(2), L::e(3)}) + MV::blade(f3, {L::e(1), L::e(2)});
  EXPECT_EQ(project_bullet(w, 1), MV::blade(f3, {L::e(2), L::e(3)}));
}

TEST(Projections, Star) {
  EXPECT_TRUE(project_star(MV::blade(kAmb22, {L::star(1), L::star(2)})).is_zero());
  const MV one = MV::blade(kAmb22, {L::e0(), L::star(1)});
  EXPECT_EQ(project_star(one), one);
  const MV w = MV::basis(kAmb22, L::e0()) + MV::blade(kAmb22, {L::star(1), L::star(2), L::e(1)});
  EXPECT_EQ(project_star(w), MV::basis(kAmb22, L::e0()));
}

TEST(Nu, Examples) {
  EXPECT_DOUBLE_EQ(nu(MV::basis(kAmb22, L::e0(), Rational(3))), 3.0);
  EXPECT_DOUBLE_EQ(nu(MV::blade(kAmb22, {L::star(1), L::star(2)})), 0.0);
  EXPECT_DOUBLE_EQ(nu(MV::blade(kAmb22, {L::e0(), L::e(1)}) + MV::blade(kAmb22, {L::star(1), L::star(2)})), 1.0);
}

TEST(PushForward, IdentityAndDiagonal) {
  fixtures::Rng rng(3);
  const MV w = wedge(vec(kAmb12, rng.rationals(4)), vec(kAmb12, rng.rationals(4)));
  EXPECT_EQ(push_forward(Matrix<Rational>::identity(4), w), w);

  const Frame f = Frame::lattice(1);
  Matrix<Rational> d(2, 2);
  d(0, 0) = 2;
  d(1, 1) = 3;
  EXPECT_EQ(push_forward(d, MV::blade(f, {L::e0(), L::e(1)})), MV::blade(f, {L::e0(), L::e(1)}, Rational(6)));
}

TEST(PushForward, MatchesWedgeOfImages) {
  fixtures::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix<Rational> m(4, 4);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) m(r, c) = rng.integer(-5, 5);
    const auto v1 = rng.rationals(4);
    const auto v2 = rng.rationals(4);
    auto apply = [&](const std::vector<Rational>& v) {
      std::vector<Rational> out(4, Rational(0));
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) out[r] += m(r, c) * v[c];
      return vec(kAmb12, out);
    };
    EXPECT_EQ(push_forward(m, wedge(vec(kAmb12, v1), vec(kAmb12, v2))), wedge(apply(v1), apply(v2)));
  }
}

TEST(Norms, Sandwich) {
  fixtures::Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    MV w = wedge(vec(kAmb22, rng.rationals(5)), vec(kAmb22, rng.rationals(5)));
    const double sup = to_double(sup_norm(w));
    const double euc = euclidean_norm(w);
    EXPECT_LE(sup, euc * (1 + 1e-12));
    EXPECT_LE(euc, std::sqrt(32.0) * sup * (1 + 1e-12));
  }
}
