#include <gtest/gtest.h>

#include "test_support.hpp"

namespace torvol {
namespace {

Point P(Rational x, Rational y) { return Point{x, y}; }

StraightSimplex S(std::vector<Point> v) { return StraightSimplex::canonicalize(std::move(v)); }

TEST(Rational, FloorAndCeilOfNegatives) {
  EXPECT_EQ(floor_of(Rational(-1, 2)), -1);
  EXPECT_EQ(ceil_of(Rational(-1, 2)), 0);
  EXPECT_EQ(floor_of(Rational(7, 3)), 2);
  EXPECT_EQ(ceil_of(make_rational(6, 3)), 2);
  EXPECT_TRUE(is_integer(make_rational(4, 2)));
}

TEST(Rational, JsonRoundTripIsExact) {
  const Rational r = make_rational(-123456789, 987654322);
  EXPECT_EQ(rational_from_json(rational_to_json(r)), r);
  const Integer big = pow2(100) + 1;
  EXPECT_EQ(integer_from_json(integer_to_json(big)), big);
  EXPECT_THROW(make_rational(1, 0), std::invalid_argument);
}

TEST(StraightSimplex, CanonicalizeTranslatesFirstVertexIntoUnitBox) {
  EXPECT_EQ(S({P(1, 0), P(2, 0), P(2, 1)}), S({P(0, 0), P(1, 0), P(1, 1)}));
  const Rational n(pow2(6));
  EXPECT_EQ(S({P(n, 0), P(n + 1, 0), P(n + 1, 1)}), S({P(0, 0), P(1, 0), P(1, 1)}));
  const auto c = S({P(0, 0), P(0, 1), P(1, 1)});
  EXPECT_EQ(c.vertex(0), P(0, 0));
  EXPECT_EQ(c.vertex(2), P(1, 1));
  EXPECT_EQ(S({P(Rational(-1, 2), 3), P(0, 0)}).vertex(0), P(Rational(1, 2), 0));
}

TEST(StraightSimplex, RejectsMixedDimensions) {
  EXPECT_THROW(S({P(0, 0), Point{Rational(1)}}), DimensionError);
  EXPECT_THROW(S({}), DimensionError);
}

TEST(Chain, BoundaryOfCircleEdgeCancels) {
  EXPECT_TRUE(boundary(Chain::of(circle_simplex({0, 1}))).is_zero());
  EXPECT_FALSE(boundary(Chain::of(circle_simplex({0, Rational(1, 2)}))).is_zero());
}

TEST(Chain, BoundaryOfTwoSimplexOnCircle) {
  // [1,2] canonicalizes to [0,1].
  Chain expected(1, 1);
  expected.add_term(circle_simplex({0, 1}), 2);
  expected.add_term(circle_simplex({0, 2}), -1);
  EXPECT_EQ(boundary(Chain::of(circle_simplex({0, 1, 2}))), expected);
}

TEST(Chain, BoundaryOfBoundaryVanishes) {
  std::mt19937 rng(20240601);
  for (int trial = 0; trial < 50; ++trial) {
    const Chain w = testing::random_chain(rng, 2, 3, 1 + trial % 7);
    EXPECT_TRUE(boundary(boundary(w)).is_zero()) << "trial " << trial;
  }
}

TEST(Chain, StepOneIdentityForKOne) {
  const Chain c = make_c();
  const Chain target = pushforward(dehn_twist().power(monodromy_power(1).get_ui()), c) - c;
  EXPECT_EQ(boundary(make_tau(1)) + make_bk(1), target);
}

TEST(Chain, PushforwardOfTwistPowers) {
  const Chain c = make_c();
  for (unsigned long k = 0; k <= 16; ++k) {
    Chain expected(2, 2);
    const Rational kk(static_cast<long>(k));
    expected.add_term(S({P(0, 0), P(1, 0), P(kk + 1, 1)}), 1);
    expected.add_term(S({P(0, 0), P(kk, 1), P(kk + 1, 1)}), -1);
    EXPECT_EQ(pushforward(dehn_twist().power(k), c), expected) << "k=" << k;
    EXPECT_EQ(degree_of(pushforward(dehn_twist().power(k), c)), 1) << "k=" << k;
  }
}

TEST(Chain, PushforwardByIdentityIsIdentity) {
  EXPECT_EQ(pushforward(AffineTorusMap::identity(2), make_c()), make_c());
  std::mt19937 rng(7);
  const Chain w = testing::random_chain(rng, 2, 3, 5);
  EXPECT_EQ(pushforward(AffineTorusMap::identity(2), w), w);
}

TEST(Chain, PushforwardCommutesWithBoundary) {
  std::mt19937 rng(11);
  const AffineTorusMap f = dehn_twist().power(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Chain w = testing::random_chain(rng, 2, 3, 4);
    EXPECT_EQ(boundary(pushforward(f, w)), pushforward(f, boundary(w)));
    const Chain v = testing::random_chain(rng, 1, 3, 4);
    EXPECT_EQ(boundary(pushforward(gamma(), v)), pushforward(gamma(), boundary(v)));
  }
}

TEST(Chain, PhiPushesCToS) {
  for (unsigned i = 0; i <= 4; ++i)
    EXPECT_EQ(pushforward(make_phi(2, i), make_c()), make_s(2, i)) << "i=" << i;
}

TEST(Chain, Norms) {
  EXPECT_EQ(l1_norm(make_c()), 2);
  for (unsigned k = 1; k <= 4; ++k) EXPECT_EQ(l1_norm(make_tau(k)), 3);
  EXPECT_EQ(l1_norm(Chain(2, 2)), 0);
}

TEST(Chain, Arithmetic) {
  const Chain c = make_c();
  EXPECT_TRUE((c + (-c)).is_zero());
  EXPECT_TRUE(scale(Integer(0), c).is_zero());
  EXPECT_EQ(scale(Integer(3), c), c + c + c);
  EXPECT_THROW(c + Chain(2, 3), DimensionError);
  EXPECT_THROW(c + Chain(1, 2), DimensionError);
}

TEST(Chain, Degrees) {
  EXPECT_EQ(degree_of(make_c()), 1);
  EXPECT_EQ(degree_of(make_c() - make_c()), 0);
  EXPECT_EQ(degree_of(-make_c()), -1);
  EXPECT_THROW(degree_of(make_tau(1)), DimensionError);
}

TEST(Chain, JsonRoundTrip) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Chain w = testing::random_chain(rng, 2, 3, 6);
    EXPECT_EQ(chain_from_json(chain_to_json(w)), w);
  }
  RationalChain r(1, 1);
  r.add_term(circle_simplex({0, Rational(1, 3)}), Rational(-5, 7));
  EXPECT_EQ(chain_from_json<Rational>(chain_to_json(r)), r);
}

TEST(Chain, JsonRejectsWrongShape) {
  nlohmann::json j = chain_to_json(make_c());
  j["terms"][0]["vertices"].erase(0);
  EXPECT_THROW(chain_from_json(j), DimensionError);
}

TEST(AffineTorusMap, ComposeAndPower) {
  const AffineTorusMap f = dehn_twist();
  EXPECT_EQ(f.power(5).matrix(), f.compose(f.power(4)).matrix());
  EXPECT_EQ(f.power(0).matrix(), AffineTorusMap::identity(2).matrix());
  EXPECT_EQ(f.determinant(), 1);
  EXPECT_EQ(make_phi(2, 1).apply(P(Rational(1, 2), Rational(1, 4))), Point{Rational(3)});
}

}  // namespace
}  // namespace torvol
