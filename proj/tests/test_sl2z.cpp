#include <gtest/gtest.h>

#include "torvol/sl2z.hpp"

namespace torvol {
namespace {

std::vector<Sl2Matrix> small_sl2z(int bound) {
  std::vector<Sl2Matrix> out;
  for (int a = -bound; a <= bound; ++a)
    for (int b = -bound; b <= bound; ++b)
      for (int c = -bound; c <= bound; ++c)
        for (int d = -bound; d <= bound; ++d)
          if (a * d - b * c == 1) out.emplace_back(a, b, c, d);
  return out;
}

TEST(Sl2Matrix, ParseAndValidate) {
  EXPECT_EQ(Sl2Matrix::parse("2,1,1,1"), Sl2Matrix(2, 1, 1, 1));
  EXPECT_EQ(Sl2Matrix::parse("-1,0,0,-1").trace(), -2);
  EXPECT_THROW(Sl2Matrix::parse("1,2,3,4"), Sl2Error);
  EXPECT_THROW(Sl2Matrix::parse("1,1,0"), Sl2Error);
  EXPECT_THROW(Sl2Matrix::parse("1,x,0,1"), Sl2Error);
  EXPECT_THROW(Sl2Matrix(2, 0, 0, 2), Sl2Error);
}

TEST(Sl2Matrix, PowersAndInverse) {
  const Sl2Matrix a(2, 1, 1, 1);
  EXPECT_EQ(a.power(3), a * a * a);
  EXPECT_EQ(a * a.inverse(), Sl2Matrix::identity());
  EXPECT_EQ(Sl2Matrix::shear().power(7), Sl2Matrix(1, 7, 0, 1));
  EXPECT_THROW(a.power(100), OverflowError);
}

TEST(Classify, Examples) {
  EXPECT_TRUE(std::holds_alternative<ReducibleTwist>(classify(Sl2Matrix(1, 1, 0, 1))));
  const auto rot = classify(Sl2Matrix(0, -1, 1, 0));
  ASSERT_TRUE(std::holds_alternative<Periodic>(rot));
  EXPECT_EQ(std::get<Periodic>(rot).order, 4);
  EXPECT_TRUE(std::holds_alternative<Anosov>(classify(Sl2Matrix(2, 1, 1, 1))));
  EXPECT_EQ(std::get<Periodic>(classify(Sl2Matrix(0, -1, 1, 1))).order, 6);
  EXPECT_EQ(std::get<Periodic>(classify(Sl2Matrix(-1, 0, 0, -1))).order, 2);
  EXPECT_EQ(describe(classify(Sl2Matrix(1, 1, 0, 1))), "reducible twist");
}

TEST(Classify, FvPositivity) {
  for (int n = 1; n <= 5; ++n) EXPECT_FALSE(fv_positive(Sl2Matrix(1, n, 0, 1)));
  EXPECT_TRUE(fv_positive(Sl2Matrix(2, 1, 1, 1)));
  EXPECT_FALSE(fv_positive(Sl2Matrix::identity()));
  EXPECT_FALSE(fv_positive(Sl2Matrix(-1, 3, 0, -1)));
}

TEST(Classify, AgreesWithTraceOnAllSmallMatrices) {
  const auto all = small_sl2z(5);
  EXPECT_GT(all.size(), 100u);
  for (const auto& m : all) {
    const auto t = std::llabs(m.trace());
    EXPECT_EQ(fv_positive(m), t > 2) << m.str();
    if (t < 2 || m.is_identity() || m.is_minus_identity()) {
      EXPECT_TRUE(is_periodic(classify(m))) << m.str();
    }
  }
}

TEST(Farey, FlipIsAnInvolution) {
  std::vector<FareyTriangle> ts{FareyTriangle::base()};
  for (std::size_t step = 0; step < 40; ++step) ts.push_back(flip(ts.back(), step % 3));
  for (const auto& t : ts)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(flip(flip(t, j), j), t) << t.str();
}

TEST(Farey, ActAndFlipExamples) {
  const FareyTriangle t0 = FareyTriangle::base();
  EXPECT_EQ(act(Sl2Matrix::shear(), t0), FareyTriangle({1, 0}, {1, 1}, {2, 1}));
  const auto j = t0.index_of({0, 1});
  ASSERT_TRUE(j.has_value());
  EXPECT_EQ(flip(t0, *j), FareyTriangle({1, 0}, {2, 1}, {1, 1}));
  EXPECT_THROW(FareyTriangle({1, 0}, {1, 0}, {0, 1}), std::invalid_argument);
}

TEST(FlipDistance, SmallCases) {
  const FareyTriangle t0 = FareyTriangle::base();
  EXPECT_EQ(flip_distance_bfs(t0, t0, 5), 0u);
  EXPECT_EQ(flip_distance_fast(t0, t0), 0u);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_EQ(flip_distance_bfs(t0, flip(t0, j), 5), 1u);
    EXPECT_EQ(flip_distance_fast(t0, flip(t0, j)), 1u);
  }
  EXPECT_EQ(flip_distance_bfs(t0, act(Sl2Matrix::shear(), t0), 5), 1u);
  EXPECT_EQ(flip_distance_bfs(t0, act(Sl2Matrix(2, 1, 1, 1).power(10), t0), 3), std::nullopt);
}

TEST(FlipDistance, FastAgreesWithBfs) {
  const FareyTriangle t0 = FareyTriangle::base();
  for (const Sl2Matrix& a : {Sl2Matrix::shear(), Sl2Matrix(2, 1, 1, 1)}) {
    Sl2Matrix p = Sl2Matrix::identity();
    for (int i = 1; i <= 40; ++i) {
      p = p * a;
      const FareyTriangle t = act(p, t0);
      const unsigned fast = flip_distance_fast(t0, t);
      if (fast > 18) break;
      EXPECT_EQ(flip_distance_bfs(t0, t, 18), fast) << a.str() << "^" << i;
      EXPECT_EQ(flip_distance_fast(t, t0), fast);
    }
  }
}

TEST(FlipDistance, FastAgreesWithBfsFromOtherStarts) {
  const FareyTriangle t0 = FareyTriangle::base();
  std::vector<FareyTriangle> starts{t0, flip(t0, 0), flip(flip(t0, 1), 2)};
  for (const auto& m : small_sl2z(2)) {
    for (const auto& s : starts) {
      const FareyTriangle t = act(m, s);
      const auto bfs = flip_distance_bfs(s, t, 12);
      if (bfs) {
        EXPECT_EQ(flip_distance_fast(s, t), *bfs) << m.str() << " from " << s.str();
      }
    }
  }
}

TEST(FlipDistance, ShearPowersGrowLinearly) {
  const FareyTriangle t0 = FareyTriangle::base();
  unsigned prev = 0;
  for (unsigned long n = 1; n <= 30; ++n) {
    const unsigned d = flip_distance_fast(t0, act(Sl2Matrix::shear().power(n), t0));
    EXPECT_GE(d, prev);
    EXPECT_EQ(d, n);  // frozen: each power adds one fan step around slope (1,0)
    prev = d;
  }
}

TEST(GrowthTable, RatiosBoundedBelow) {
  for (const Sl2Matrix& a : {Sl2Matrix::shear(), Sl2Matrix(2, 1, 1, 1)}) {
    const auto rows = spine_growth_table(a, 20);
    ASSERT_EQ(rows.size(), 20u);
    for (const auto& r : rows) {
      EXPECT_GE(2 * r.distance, r.i) << a.str() << " i=" << r.i;  // ratio >= 1/2
      EXPECT_EQ(r.spine_proxy, 2 * r.distance);
    }
  }
}

TEST(GrowthTable, AnosovRatiosConverge) {
  const auto rows = spine_growth_table(Sl2Matrix(2, 1, 1, 1), 15);
  double lo = 1e9, hi = 0;
  for (std::size_t k = rows.size() - 5; k < rows.size(); ++k) {
    const double r = static_cast<double>(rows[k].distance) / static_cast<double>(rows[k].i);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  EXPECT_LE(hi, 1.2 * lo);
  EXPECT_EQ(rows[14].distance, 30u);
}

TEST(GrowthTable, PeriodicIsRejected) {
  EXPECT_THROW(spine_growth_table(Sl2Matrix(0, -1, 1, 0), 5), Sl2Error);
}

}  // namespace
}  // namespace torvol
