#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "circlestab/error.hpp"
#include "circlestab/geometry.hpp"
#include "fixtures.hpp"

using namespace circlestab;
using fixtures::placed;

namespace {

// Dense sampling followed by shrinking local grids around the best pair.
double sampled_distance(const Circle& a, const Circle& b) {
  const int n = 1500;
  double best = 1e300, ta = 0, tb = 0;
  const double step = 2 * std::numbers::pi / n;
  for (int i = 0; i < n; ++i) {
    const Vec3 p = a.point(i * step);
    for (int j = 0; j < n; ++j) {
      const double d = (p - b.point(j * step)).norm();
      if (d < best) {
        best = d;
        ta = i * step;
        tb = j * step;
      }
    }
  }
  for (double h = step; h > 1e-12; h *= 0.5)
    for (int round = 0; round < 4; ++round)
      for (int di = -2; di <= 2; ++di)
        for (int dj = -2; dj <= 2; ++dj) {
          const double d = (a.point(ta + di * h) - b.point(tb + dj * h)).norm();
          if (d < best) {
            best = d;
            ta += di * h;
            tb += dj * h;
          }
        }
  return best;
}

Configuration two_circle_example() {
  return Configuration({placed({0, 0, 0}, 1, Vec3::UnitZ()), placed({0.5, 0, 0.1}, 0.2, Vec3::UnitX())});
}

}  // namespace

TEST(Circle, Invariants) {
  const Circle c({0.5, 0.5, 0.5}, 0.2, {0, 0, 3});
  EXPECT_DOUBLE_EQ(c.normal().norm(), 1.0);
  EXPECT_NEAR(c.u().dot(c.normal()), 0, 1e-15);
  EXPECT_NEAR((c.u().cross(c.v()) - c.normal()).norm(), 0, 1e-15);
  EXPECT_THROW(Circle({0.5, 0.5, 0.5}, 1e-7, {0, 0, 1}), Error);
  EXPECT_THROW(Circle({0.5, 0.5, 0.5}, 0.1, {0, 0, 0}), Error);
  EXPECT_DOUBLE_EQ(c.extent(2), 0.0);
  EXPECT_DOUBLE_EQ(c.extent(0), 0.2);
  EXPECT_TRUE(c.inside_cube(0));
  EXPECT_FALSE(Circle({0.1, 0.5, 0.5}, 0.2, {0, 0, 1}).inside_cube(0));
}

TEST(Configuration, Validation) {
  EXPECT_NO_THROW(two_circle_example());
  // Not inside the cube.
  EXPECT_THROW(Configuration({Circle({0.1, 0.5, 0.5}, 0.2, {0, 0, 1})}), Error);
  // The second curve passes through (0.7, 0.5, 0.5), a point of the first.
  EXPECT_THROW(Configuration({Circle({0.5, 0.5, 0.5}, 0.2, {0, 0, 1}), Circle({0.8, 0.5, 0.5}, 0.1, {0, 1, 0})}), Error);
}

TEST(CurveDistance, ClosedForms) {
  EXPECT_NEAR(curve_distance(Circle({0, 0, 0}, 1, {0, 0, 1}), Circle({0, 0, 0}, 2, {0, 0, 1})), 1.0, 1e-9);
  EXPECT_NEAR(curve_distance(Circle({0, 0, 0}, 1, {0, 0, 1}), Circle({0, 0, 0.3}, 1, {0, 0, 1})), 0.3, 1e-9);
}

TEST(CurveDistance, SamplingOracle) {
  const Circle a({0.3, 0.4, 0.5}, 0.15, {0.2, 0.5, 1});
  const Circle b({0.55, 0.45, 0.58}, 0.12, {1, 0.3, -0.2});
  const double d = curve_distance(a, b);
  EXPECT_GT(d, 0);
  EXPECT_NEAR(d, sampled_distance(a, b), 1e-6);
  KeyedRng rng(3, 0);
  for (int i = 0; i < 5; ++i) {
    auto rv = [&] { return Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)); };
    const Circle x(rv(), rng.uniform(0.2, 1.0), rv());
    const Circle y(rv(), rng.uniform(0.2, 1.0), rv());
    EXPECT_NEAR(curve_distance(x, y), sampled_distance(x, y), 1e-6);
  }
}

TEST(Predicates, MeetsDisk) {
  const Circle c1({0, 0, 0}, 1, Vec3::UnitZ());
  const Circle c2({0.5, 0, 0.1}, 0.2, Vec3::UnitX());
  EXPECT_TRUE(meets_disk(c1, c2));
  const auto cfg = two_circle_example();
  EXPECT_TRUE(meets_disk(cfg, 0, 1));
  EXPECT_FALSE(meets_disk(cfg, 1, 0));
  const Configuration corners({Circle({0.2, 0.2, 0.2}, 0.1, {0, 0, 1}), Circle({0.8, 0.8, 0.8}, 0.1, {0, 0, 1})});
  EXPECT_FALSE(meets_disk(corners, 0, 1));
  const Configuration coplanar({Circle({0.3, 0.5, 0.5}, 0.1, {0, 0, 1}), Circle({0.7, 0.5, 0.5}, 0.1, {0, 0, 1})});
  EXPECT_FALSE(meets_disk(coplanar, 0, 1));
  EXPECT_THROW(meets_disk(c1, c1), Error);
  EXPECT_THROW(meets_disk(cfg, 0, 0), Error);
}

TEST(Predicates, CenterInDisk) {
  const Circle big = placed({0, 0, 0}, 1, Vec3::UnitZ());
  auto with = [&](const Vec3& c) { return Configuration({big, placed(c, 0.05, Vec3::UnitX())}); };
  EXPECT_TRUE(center_in_disk(with({0.1, 0, 0}), 0, 1));
  EXPECT_FALSE(center_in_disk(with({0, 0, 0.5}), 0, 1));
  // In the plane but outside the disk.
  const Configuration edge({Circle({0.5, 0.5, 0.5}, 0.2, Vec3::UnitZ()), Circle({0.75, 0.5, 0.5}, 0.02, Vec3::UnitX())});
  EXPECT_FALSE(center_in_disk(edge, 0, 1));
}

TEST(Predicates, Microcosms) {
  const Configuration far({Circle({0.1, 0.1, 0.1}, 0.01, {0, 0, 1}), Circle({0.9, 0.9, 0.9}, 0.01, {0, 0, 1})});
  EXPECT_FALSE(microcosms_intersect(far, 0, 1));
  const Configuration near({placed({0, 0, 0}, 1, Vec3::UnitZ()), placed({1.5, 0, 0}, 0.25, Vec3::UnitZ())});
  EXPECT_TRUE(microcosms_intersect(near, 0, 1));
  EXPECT_THROW(microcosms_intersect(near, 1, 1), Error);
}

TEST(Complexity, Examples) {
  EXPECT_EQ(complexity(Configuration({Circle({0.5, 0.5, 0.5}, 0.1, {0, 0, 1})})), 0.0);
  const Configuration pair({placed({0, 0, 0}, 1, Vec3::UnitZ()), placed({1.5, 0, 0}, 0.25, Vec3::UnitZ())});
  EXPECT_DOUBLE_EQ(complexity(pair), 0.25);
  const Configuration three({placed({0, 0, 0}, 1, Vec3::UnitZ()), placed({1.5, 0, 0}, 0.25, Vec3::UnitZ()),
                             placed({-1.6, 0, 0}, 0.5, Vec3::UnitZ())});
  double oracle = 0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j)
      if (microcosms_intersect(three, i, j)) {
        const double a = three[i].radius(), b = three[j].radius();
        oracle = std::max(oracle, std::min(a, b) / std::max(a, b));
      }
  EXPECT_DOUBLE_EQ(oracle, 0.5);
  EXPECT_DOUBLE_EQ(complexity(three), oracle);
}

TEST(GoodCircles, Examples) {
  const auto boxed = random_unlinked(6, 4);
  EXPECT_EQ(good_circles(boxed).size(), 6u);
  EXPECT_EQ(good_circles(two_circle_example()), (std::vector<std::size_t>{1}));
  EXPECT_EQ(good_circles(Configuration({Circle({0.5, 0.5, 0.5}, 0.1, {0, 0, 1})})), (std::vector<std::size_t>{0}));
}

TEST(Classify, Examples) {
  const auto boxed = random_unlinked(5, 9);
  for (std::size_t s = 0; s <= 5; ++s) {
    const auto c = classify(boxed, s);
    EXPECT_TRUE(c.in_D && c.in_F);
  }
  const auto c = classify(two_circle_example(), 2);
  EXPECT_FALSE(c.in_D);
  EXPECT_TRUE(c.in_F);
  const auto z = classify(two_circle_example(), 0);
  EXPECT_TRUE(z.in_D && z.in_F);
}

TEST(ShrinkSlice, Examples) {
  const auto cfg = two_circle_example();
  EXPECT_EQ(shrink_slice(cfg, 0), cfg);
  const Configuration single({placed({0, 0, 0}, 1, Vec3::UnitZ())});
  EXPECT_NEAR(shrink_slice(single, 0.2 * 0.6)[0].radius(), 0.2 * 0.8, 1e-15);
  const Configuration pair({placed({0, 0, 0}, 1, Vec3::UnitZ()), placed({1.5, 0, 0}, 0.25, Vec3::UnitZ())});
  const auto sliced = shrink_slice(pair, 0.2 * 0.1);
  EXPECT_LT(sliced[1].radius() / sliced[0].radius(), 0.25);
}

TEST(Stabilize, Examples) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto cfg = random_unlinked(4, seed);
    const auto st = stabilize(cfg);
    EXPECT_EQ(st.size(), cfg.size() + 1);
    EXPECT_DOUBLE_EQ(complexity(st), complexity(cfg));
    EXPECT_EQ(good_circles(st).size(), good_circles(cfg).size() + 1);
  }
}

TEST(Similarity, CurveDistanceScales) {
  const auto cfg = random_unlinked(4, 21);
  const auto moved = similarity(cfg, 0.5, {0.1, 0.2, 0.3});
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j)
      EXPECT_NEAR(curve_distance(moved[i], moved[j]), 0.5 * curve_distance(cfg[i], cfg[j]), 1e-9);
}

TEST(Generator, Examples) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) EXPECT_EQ(random_unlinked(1, seed).size(), 1u);
  GeneratorParams jitter;
  jitter.jitter_moves = 40;
  EXPECT_EQ(random_unlinked(8, 5, jitter), random_unlinked(8, 5, jitter));
  EXPECT_FALSE(random_unlinked(8, 5, jitter) == random_unlinked(8, 6, jitter));
}

TEST(Generator, TwentyCirclesWithJitter) {
  GeneratorParams jitter;
  jitter.jitter_moves = 40;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto cfg = random_unlinked(20, seed, jitter);
    ASSERT_EQ(cfg.size(), 20u);
    ASSERT_FALSE(configuration_problem(cfg.circles(), cfg.tolerances()).has_value());
  }
}
