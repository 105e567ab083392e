#include <gtest/gtest.h>

#include "test_support.hpp"

namespace torvol {
namespace {

const FiniteModel& torus_model() {
  static const FiniteModel model = build_model({2, 2, 2, 2, 200000});
  return model;
}

TEST(FiniteModel, CircleModelByHand) {
  const FiniteModel model = build_model({1, 1, 1, 2});
  for (int v : {0, 1, 2})
    EXPECT_TRUE(model.lower_index(circle_simplex({0, v})).has_value()) << v;
  // Upper simplices have their first vertex at 0 and the others in [0, 2].
  EXPECT_EQ(model.upper().size(), 9u);
  for (const auto& s : model.upper()) {
    EXPECT_EQ(s.vertex(0)[0], 0);
    for (const Point& p : s.vertices()) EXPECT_LE(p[0], 2);
  }
}

TEST(FiniteModel, ColumnIsTheBoundary) {
  const FiniteModel model = build_model({1, 1, 1, 2});
  const StraightSimplex s = circle_simplex({0, 1, 2});
  const auto it = std::find(model.upper().begin(), model.upper().end(), s);
  ASSERT_NE(it, model.upper().end());
  const auto& col = model.columns()[static_cast<std::size_t>(it - model.upper().begin())];
  Chain from_column(1, 1);
  for (const auto& [r, v] : col) from_column.add_term(model.lower()[r], v);
  Chain expected(1, 1);
  expected.add_term(circle_simplex({0, 1}), 2);  // [1,2] + [0,1]
  expected.add_term(circle_simplex({0, 2}), -1);
  EXPECT_EQ(from_column, expected);
}

TEST(FiniteModel, TorusModelContainsTheCycles) {
  const FiniteModel& model = torus_model();
  EXPECT_EQ(model.upper().size(), 62500u);
  for (const Chain& z : {make_a(), make_b(), make_c()}) {
    EXPECT_NO_THROW(model.coordinates(z));
    for (const auto& [s, k] : z.terms()) EXPECT_TRUE(model.lower_index(s).has_value()) << s.str();
  }
}

TEST(FiniteModel, Errors) {
  EXPECT_THROW(build_model({2, 2, 4, 4, 1000}), FillingError);
  try {
    build_model({2, 2, 4, 4, 1000});
  } catch (const FillingError& e) {
    EXPECT_EQ(e.kind(), FillingError::Kind::kUniverseTooLarge);
  }
  EXPECT_THROW(build_model({1, 1, 0, 1}), std::invalid_argument);
  const FiniteModel model = build_model({1, 1, 1, 1});
  Chain far(1, 1);
  far.add_term(circle_simplex({0, 5}), 1);
  far.add_term(circle_simplex({0, Rational(1, 3)}), 1);
  try {
    model.coordinates(far);
    FAIL() << "expected kNotRepresentable";
  } catch (const FillingError& e) {
    EXPECT_EQ(e.kind(), FillingError::Kind::kNotRepresentable);
  }
  EXPECT_THROW(model.coordinates(make_c()), DimensionError);
}

TEST(Fill, ZeroTarget) {
  const FiniteModel model = build_model({1, 1, 1, 2});
  const auto real = fill_real(model, Chain(1, 1));
  EXPECT_EQ(real.value, 0);
  EXPECT_TRUE(real.witness.is_zero());
  EXPECT_EQ(fill_int(build_model({2, 2, 1, 1}), make_c() - make_c()).value, 0);
  EXPECT_EQ(oracle_fill_int(model, Chain(1, 1), 3), Integer(0));
}

TEST(Fill, SingleSimplexBoundary) {
  const FiniteModel model = build_model({1, 1, 1, 2});
  const Chain z = boundary(Chain::of(circle_simplex({0, 1, 2})));
  const auto real = fill_real(model, z);
  EXPECT_LE(real.value, 1);
  EXPECT_TRUE(verify_certificate(model, z, real));
  const auto integral = fill_int(model, z);
  EXPECT_EQ(integral.value, 1);
  EXPECT_EQ(integral.witness.size(), 1u);
  EXPECT_EQ(boundary(integral_witness(integral)), z);
  EXPECT_EQ(oracle_fill_int(model, z, 4), Integer(1));
}

TEST(Fill, CycleThatIsNotABoundary) {
  const FiniteModel model = build_model({1, 1, 2, 1});
  const Chain z = Chain::of(circle_simplex({0, 1}));
  for (auto solve : {fill_real, +[](const FiniteModel& m, const Chain& c) {
                       return fill_int(m, c);
                     }}) {
    try {
      solve(model, z);
      FAIL() << "expected kNotABoundary";
    } catch (const FillingError& e) {
      EXPECT_EQ(e.kind(), FillingError::Kind::kNotABoundary);
    }
  }
  EXPECT_EQ(oracle_fill_int(model, z, 4), std::nullopt);
}

TEST(Fill, ZeroSimplexNeverBounds) {
  const FiniteModel model = build_model({1, 0, 2, 2});
  Chain z(1, 0);
  z.add_term(StraightSimplex::canonicalize({Point{Rational(1, 2)}}), 1);
  EXPECT_EQ(oracle_fill_int(model, z, 5), std::nullopt);
  EXPECT_THROW(fill_int(model, z), FillingError);
  // A difference of two points does bound.
  z.add_term(StraightSimplex::canonicalize({Point{Rational(0)}}), -1);
  EXPECT_EQ(fill_int(model, z).value, 1);
  EXPECT_EQ(oracle_fill_int(model, z, 5), Integer(1));
}

TEST(Fill, NodeCapIsReported) {
  const FiniteModel model = build_model({1, 1, 1, 2});
  const Chain z = boundary(Chain::of(circle_simplex({0, 1, 2})));
  try {
    fill_int(model, z, FillOptions{0});
    FAIL() << "expected kBudgetExhausted";
  } catch (const FillingError& e) {
    EXPECT_EQ(e.kind(), FillingError::Kind::kBudgetExhausted);
  }
}

// fill_int against the exhaustive oracle on small models, with every
// certificate re-verified through the chain calculus.
class OracleAgreement : public ::testing::TestWithParam<ModelParams> {};

TEST_P(OracleAgreement, RandomBoundaries) {
  const FiniteModel model = build_model(GetParam());
  ASSERT_LE(model.upper().size(), 5000u);
  std::mt19937 rng(1000 + static_cast<unsigned>(model.upper().size()));
  for (int trial = 0; trial < 20; ++trial) {
    const auto rb = testing::random_boundary(rng, model, 1 + trial % 3);
    const auto integral = fill_int(model, rb.z);
    const auto real = fill_real(model, rb.z);
    const auto oracle = oracle_fill_int(model, rb.z, rb.generator_norm);
    ASSERT_TRUE(oracle.has_value()) << "trial " << trial;
    EXPECT_EQ(integral.value, Rational(*oracle)) << "trial " << trial;
    EXPECT_LE(real.value, integral.value);
    EXPECT_LE(integral.value, rb.generator_norm);
    std::string why;
    EXPECT_TRUE(verify_certificate(model, rb.z, integral, &why)) << why;
    EXPECT_TRUE(verify_certificate(model, rb.z, real, &why)) << why;
  }
}

INSTANTIATE_TEST_SUITE_P(SmallModels, OracleAgreement,
                         ::testing::Values(ModelParams{1, 1, 1, 3}, ModelParams{1, 1, 2, 2},
                                           ModelParams{1, 2, 1, 3}, ModelParams{2, 1, 1, 1},
                                           ModelParams{2, 1, 2, 1}, ModelParams{2, 2, 1, 1}));

TEST(Fill, TamperedCertificateIsRejected) {
  const FiniteModel model = build_model({1, 1, 1, 3});
  const Chain z = boundary(Chain::of(circle_simplex({0, 1, 3})));
  auto cert = fill_real(model, z);
  ASSERT_TRUE(verify_certificate(model, z, cert));
  auto bad_value = cert;
  bad_value.value += 1;
  EXPECT_FALSE(verify_certificate(model, z, bad_value));
  auto bad_dual = cert;
  bad_dual.dual[0] += 5;
  EXPECT_FALSE(verify_certificate(model, z, bad_dual));
  auto bad_witness = cert;
  bad_witness.witness = scale(Rational(2), cert.witness);
  EXPECT_FALSE(verify_certificate(model, z, bad_witness));
}

TEST(Fill, RelaxationNeverExceedsIntegral) {
  const FiniteModel model = build_model({1, 1, 2, 2});
  std::mt19937 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const auto rb = testing::random_boundary(rng, model, 4);
    EXPECT_LE(fill_real(model, rb.z).value, fill_int(model, rb.z).value);
  }
}

TEST(Fill, AlphaAndBetaInstances) {
  const FiniteModel& model = torus_model();
  for (const Chain& z : {make_a() - make_c(), make_c() - make_b()}) {
    const auto real = fill_real(model, z);
    const auto integral = fill_int(model, z);
    EXPECT_LE(real.value, integral.value);
    EXPECT_EQ(integral.value, 3);
    EXPECT_EQ(real.value, 3);
    EXPECT_TRUE(verify_certificate(model, z, real));
    EXPECT_TRUE(verify_certificate(model, z, integral));
    EXPECT_EQ(oracle_fill_int(model, z, 3, model.upper().size()), Integer(3));
    EXPECT_EQ(oracle_fill_int(model, z, 2, model.upper().size()), std::nullopt);
  }
}

TEST(Fill, CertificateJson) {
  const FiniteModel model = build_model({1, 1, 1, 2});
  const Chain z = boundary(Chain::of(circle_simplex({0, 1, 2})));
  const auto j = certificate_to_json(fill_int(model, z));
  EXPECT_EQ(j.at("mode"), "integral");
  EXPECT_EQ(rational_from_json(j.at("value")), 1);
  EXPECT_EQ(j.at("dual").size(), model.lower().size());
  EXPECT_EQ(boundary(chain_from_json<Rational>(j.at("witness"))), to_rational(z));
}

// Enlarging the model (q | q', D <= D') can only lower fill values.
TEST(Fill, MonotoneInModel) {
  struct Pair {
    ModelParams small, large;
  };
  const std::vector<Pair> pairs{
      {{1, 1, 1, 2}, {1, 1, 2, 2}}, {{1, 1, 1, 2}, {1, 1, 1, 3}}, {{1, 1, 1, 2}, {1, 1, 2, 3}},
      {{1, 1, 2, 1}, {1, 1, 4, 1}}, {{1, 2, 1, 2}, {1, 2, 1, 3}}, {{2, 1, 1, 1}, {2, 1, 2, 1}},
      {{2, 1, 1, 1}, {2, 1, 1, 2}}, {{2, 2, 1, 1}, {2, 2, 1, 2}}, {{2, 2, 1, 1}, {2, 2, 2, 1}},
      {{1, 1, 2, 2}, {1, 1, 4, 2}}};
  std::mt19937 rng(4242);
  for (const auto& p : pairs) {
    const FiniteModel small = build_model(p.small), large = build_model(p.large);
    const auto rb = testing::random_boundary(rng, small, 3);
    const auto vi_small = fill_int(small, rb.z).value, vi_large = fill_int(large, rb.z).value;
    const auto vr_small = fill_real(small, rb.z).value, vr_large = fill_real(large, rb.z).value;
    EXPECT_LE(vi_large, vi_small) << p.small.str() << " -> " << p.large.str();
    EXPECT_LE(vr_large, vr_small) << p.small.str() << " -> " << p.large.str();
  }
}

}  // namespace
}  // namespace torvol
