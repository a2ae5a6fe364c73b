#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "perronlab/perron.hpp"

using namespace perronlab;

namespace {

// Plain enumeration of r + 1/r over the admissible (n, l) range.
double brute_G(const std::vector<double>& b, std::size_t N) {
  double g = 0.0;
  for (std::size_t n = 1; n <= N; ++n)
    for (std::size_t l = 1; l <= n; ++l) {
      const double r = (b[n + 2 * l] - b[n + l]) / (b[n + l] - b[n]);
      g = std::max(g, r + 1 / r);
    }
  return g;
}

}  // namespace

TEST(Slopes, Generators) {
  const SlopeSequence p1 = SlopeSequence::power(1.0, 5);
  EXPECT_EQ(p1.values(), (std::vector<double>{0, 1, 2, 3, 4}));
  const SlopeSequence p2 = SlopeSequence::power(2.0, 4);
  EXPECT_EQ(p2.values(), (std::vector<double>{0, 1, 4, 9}));
  EXPECT_THROW(SlopeSequence::explicit_values({0, 2, 1}), std::invalid_argument);
  EXPECT_THROW(SlopeSequence::explicit_values({1, 2, 3}), std::invalid_argument);
  EXPECT_NO_THROW(SlopeSequence::explicit_values({0, 0.5, 3}));
}

TEST(PerronFactor, Linear) {
  const SlopeSequence b = SlopeSequence::power(1.0, 601);
  EXPECT_NEAR(perron_factor(b, 200).value, 2.0, 1e-12);
  EXPECT_NEAR(brute_G(b.values(), 200), 2.0, 1e-12);
}

TEST(PerronFactor, Squares) {
  const SlopeSequence b = SlopeSequence::power(2.0, 601);
  const PerronFactor g = perron_factor(b, 200);
  // (b_3 - b_2)/(b_2 - b_1) = 5/3 at n = l = 1.
  EXPECT_NEAR(g.value, 5.0 / 3.0 + 3.0 / 5.0, 1e-12);
  EXPECT_NEAR(g.value, 34.0 / 15.0, 1e-12);
  EXPECT_EQ(g.n, 1u);
  EXPECT_EQ(g.l, 1u);
  EXPECT_NEAR(g.value, brute_G(b.values(), 200), 1e-12);
}

TEST(PerronFactor, GeometricIsUnbounded) {
  std::vector<double> v;
  for (int k = 0; k <= 61; ++k) v.push_back(std::ldexp(1.0, k) - 1.0);
  const SlopeSequence b = SlopeSequence::explicit_values(v);
  EXPECT_GT(perron_factor(b, 20).value, 100.0);
  EXPECT_GT(perron_factor(b, 20).value, perron_factor(b, 10).value);
}

TEST(PerronFactor, StabilisesForPowers) {
  for (double s : {0.5, 1.0, 2.0}) {
    const SlopeSequence b = SlopeSequence::power(s, 601);
    EXPECT_NEAR(perron_factor(b, 200).value, perron_factor(b, 100).value, 1e-12) << s;
  }
  EXPECT_THROW(perron_factor(SlopeSequence::power(1.0, 10), 4), std::out_of_range);
}

TEST(TechnicalConstant, Examples) {
  const TechnicalConstant c1 = technical_constant(SlopeSequence::power(1.0, 100), 99);
  EXPECT_NEAR(c1.value, 1.0, 1e-15);
  EXPECT_EQ(c1.k, 1u);
  const TechnicalConstant c2 = technical_constant(SlopeSequence::power(2.0, 100), 99);
  EXPECT_NEAR(c2.value, 2.0 / 9.0, 1e-15);
  EXPECT_EQ(c2.k, 2u);
  // Geometric slopes keep c* = 1/2 (attained at k = 2); only faster growth
  // such as b_k = 2^{k^2} - 1 drives it to zero.
  std::vector<double> v;
  for (int k = 0; k <= 30; ++k) v.push_back(std::ldexp(1.0, k) - 1.0);
  const auto geo = SlopeSequence::explicit_values(v);
  EXPECT_NEAR(technical_constant(geo, 30).value, 0.5, 1e-15);
  std::vector<double> w;
  for (int k = 0; k <= 6; ++k) w.push_back(std::ldexp(1.0, k * k) - 1.0);
  const auto fast = SlopeSequence::explicit_values(w);
  EXPECT_LT(technical_constant(fast, 6).value, 1e-3);
  EXPECT_LT(technical_constant(fast, 6).value, technical_constant(fast, 3).value);
}

TEST(Triangles, Areas) {
  const auto t1 = triangles(SlopeSequence::power(1.0, 2));
  ASSERT_EQ(t1.size(), 1u);
  EXPECT_NEAR(t1[0].area(), 0.5, 1e-15);
  const auto t2 = triangles(SlopeSequence::power(1.0, 3));
  EXPECT_NEAR(union_area_triangles(t2), 1.0, 1e-15);
  const auto sq = triangles(SlopeSequence::power(2.0, 20));
  for (std::size_t k = 1; k < 20; ++k) EXPECT_NEAR(sq[k - 1].area(), (2.0 * k - 1) / 2, 1e-12);
}

TEST(Bisection, Examples) {
  const Triangle t1({0, 1}, {-1, 0}, {0, 0});
  const Triangle t2({0, 1}, {0, 0}, {1, 0});
  const BisectionResult half = bisection_step(t1, t2, 0.5);
  EXPECT_NEAR(half.predicted, 0.75, 1e-15);
  EXPECT_NEAR(half.measured, 0.75, 1e-12);
  EXPECT_NEAR(half.shift, 1.0, 1e-15);
  const BisectionResult two_thirds = bisection_step(t1, t2, 2.0 / 3.0);
  EXPECT_NEAR(two_thirds.predicted, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(two_thirds.measured, 2.0 / 3.0, 1e-12);
  const BisectionResult near_one = bisection_step(t1, t2, 1 - 1e-9);
  EXPECT_NEAR(near_one.shift, 0.0, 1e-8);
  EXPECT_NEAR(near_one.measured, 1.0, 1e-8);
  EXPECT_THROW(bisection_step(t1, t2, 1.0), std::invalid_argument);
  EXPECT_THROW(bisection_step(t1, t2, 0.0), std::invalid_argument);
  EXPECT_THROW(bisection_step(t2, t1, 0.5), std::invalid_argument);
  EXPECT_THROW(bisection_step(t1, t2, 0.49), std::invalid_argument);
}

TEST(Bisection, MeasuredMatchesMonteCarlo) {
  const Triangle t1({0.3, 1}, {-1, 0}, {0.2, 0});
  const Triangle t2({0.3, 1}, {0.2, 0}, {1.7, 0});
  const BisectionResult r = bisection_step(t1, t2, 0.7);
  const double s = r.shift;
  const auto mc = oracle::mc_union_area({{{-1, 0}, {0.2, 0}, {0.3, 1}}, {{0.2 - s, 0}, {1.7 - s, 0}, {0.3 - s, 1}}},
                                        -2.0, 0.0, 2.0, 1.0, 500);
  const double before = 0.5 * 2.7;
  EXPECT_NEAR(r.measured * before, mc.area, mc.err);
}

TEST(Bisection, RandomIdentity) {
  std::mt19937_64 rng(97);
  std::uniform_real_distribution<double> len(0.01, 5.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> apex(-3.0, 3.0);
  std::uniform_real_distribution<double> height(0.2, 4.0);
  for (int t = 0; t < 500; ++t) {
    const double x = len(rng);
    const double y = len(rng);
    const double h = height(rng);
    const Vec2 top{apex(rng), h};
    const double lo = std::max(x, y) / (x + y);
    const double alpha = lo + (1 - lo) * (0.001 + 0.998 * u(rng));
    const BisectionResult r = bisection_step(Triangle(top, {-x, 0}, {0, 0}), Triangle(top, {0, 0}, {y, 0}), alpha);
    ASSERT_NEAR(r.measured, r.predicted, 1e-9 * r.predicted);
  }
}

TEST(AlphaSchedule, ParseAndResolve) {
  EXPECT_EQ(AlphaSchedule::parse("optimal").kind, AlphaSchedule::Kind::BoundOptimal);
  EXPECT_EQ(AlphaSchedule::parse("classical").kind, AlphaSchedule::Kind::Classical);
  const AlphaSchedule c = AlphaSchedule::parse("constant:0.5");
  EXPECT_EQ(c.resolve(3, 2.0), (std::vector<double>{0.5, 0.5, 0.5}));
  const AlphaSchedule l = AlphaSchedule::parse("levels:0.5,0.7");
  EXPECT_EQ(l.resolve(3, 2.0), (std::vector<double>{0.5, 0.7, 0.7}));
  EXPECT_EQ(AlphaSchedule::parse(l.to_string()).levels, l.levels);
  EXPECT_THROW(AlphaSchedule::parse("constant"), std::invalid_argument);
  EXPECT_THROW(AlphaSchedule::parse("constant:1.5").resolve(2, 2.0), std::invalid_argument);
  EXPECT_THROW(AlphaSchedule::parse("bogus"), std::invalid_argument);
  // Classical: max(1 - 1/sqrt(n), G/(1+G)).
  EXPECT_NEAR(AlphaSchedule::parse("classical").resolve(4, 2.0)[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(AlphaSchedule::parse("classical").resolve(16, 2.0)[0], 0.75, 1e-15);
}

TEST(AlphaSchedule, OptimalMinimisesBound) {
  for (std::size_t n = 1; n <= 8; ++n) {
    const double a = AlphaSchedule{}.resolve(n, 2.0)[0];
    const double best = perron_bound(n, a, 2.0);
    for (int i = 1; i < 1000; ++i) ASSERT_LE(best, perron_bound(n, i / 1000.0, 2.0) + 1e-12);
  }
}

TEST(Block, SmallCases) {
  const SlopeSequence b = SlopeSequence::power(1.0, 64);
  const PerronBlock b0 = build_block(b, 0);
  EXPECT_EQ(b0.count(), 1u);
  EXPECT_NEAR(b0.eps_measured, 1.0, 1e-15);
  const PerronBlock b1 = build_block(b, 1, AlphaSchedule::parse("constant:0.5"));
  EXPECT_NEAR(b1.eps_measured, 0.75, 1e-12);
  EXPECT_THROW(build_block(b, 6), std::out_of_range);
}

TEST(Block, IdentityScheduleKeepsAbutting) {
  const SlopeSequence b = SlopeSequence::power(1.5, 64);
  const PerronBlock blk = build_block(b, 5, AlphaSchedule::parse("constant:1"));
  EXPECT_NEAR(blk.eps_measured, 1.0, 1e-9);
  for (double t : blk.translations) EXPECT_NEAR(t, 0.0, 1e-12);
}

TEST(Block, TranslatedTrianglesAreHorizontal) {
  const SlopeSequence b = SlopeSequence::power(1.0, 64);
  const PerronBlock blk = build_block(b, 4);
  const auto ts = block_triangles(b, blk);
  for (const Triangle& t : ts) {
    EXPECT_EQ(t.a.y, 1.0);
    EXPECT_EQ(t.b.y, 0.0);
    EXPECT_EQ(t.c.y, 0.0);
  }
  EXPECT_NEAR(union_area_triangles(ts), blk.area_translated, 1e-12);
  EXPECT_NEAR(blk.area_original, (b[31] - b[15]) / 2, 1e-12);
}

TEST(Block, AreaAgreesWithMonteCarlo) {
  const SlopeSequence b = SlopeSequence::power(1.0, 16);
  const PerronBlock blk = build_block(b, 3);
  std::vector<std::vector<oracle::Vec2>> raw;
  double x0 = 1e9, x1 = -1e9;
  for (const Triangle& t : block_triangles(b, blk)) {
    raw.push_back({t.b, t.c, t.a});
    x0 = std::min({x0, t.a.x, t.b.x});
    x1 = std::max({x1, t.a.x, t.c.x});
  }
  const auto mc = oracle::mc_union_area(raw, x0, 0.0, x1, 1.0, 600);
  EXPECT_NEAR(blk.area_translated, mc.area, mc.err);
}

TEST(Block, LinearSlopesDecrease) {
  const SlopeSequence b = SlopeSequence::power(1.0, 256);
  double prev = 1.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t n = 2; n <= 7; ++n) {
    const PerronBlock blk = build_block(b, n);
    EXPECT_LT(blk.eps_measured, prev) << n;
    EXPECT_LE(blk.eps_measured, blk.eps_bound + 1e-9) << n;
    EXPECT_TRUE(blk.levels_within_G()) << n;
    EXPECT_TRUE(blk.pairing_regime_ok) << n;
    prev = blk.eps_measured;
  }
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 30.0);
}

TEST(Block, FrozenEpsilons) {
  // Values from an independent sweep of the same construction.
  const SlopeSequence b = SlopeSequence::power(1.0, 256);
  EXPECT_NEAR(build_block(b, 2).eps_measured, 0.5001, 5e-4);
  EXPECT_NEAR(build_block(b, 7).eps_measured, 0.2435, 5e-4);
}

TEST(Block, ParallelMatchesSequential) {
  const SlopeSequence b = SlopeSequence::power(0.5, 128);
  const auto many = build_blocks(b, 1, 6);
  for (std::size_t n = 1; n <= 6; ++n) {
    const PerronBlock one = build_block(b, n);
    EXPECT_EQ(many[n - 1].translations, one.translations);
    EXPECT_EQ(many[n - 1].eps_measured, one.eps_measured);
  }
}

TEST(Block, Svg) {
  const SlopeSequence b = SlopeSequence::power(1.0, 16);
  const std::string svg = block_svg(b, build_block(b, 3));
  EXPECT_NE(svg.find("version=\"1.1\""), std::string::npos);
  std::size_t count = 0;
  for (std::size_t p = svg.find("<polygon"); p != std::string::npos; p = svg.find("<polygon", p + 1)) ++count;
  EXPECT_EQ(count, 8u);
  EXPECT_NE(svg.find("n=3"), std::string::npos);
}
