#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "brute_force.hpp"
#include "qwalk/error.hpp"
#include "qwalk/metrics.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {
namespace {

Distribution make_1d(int t_max, std::initializer_list<std::pair<int, double>> mass) {
  const Geometry g = Geometry::square(1, t_max);
  std::vector<double> p(g.num_sites(), 0.0);
  for (auto [x, w] : mass) p[g.site_index({x, 0})] = w;
  return Distribution(g, p, 0);
}

TEST(Distribution, SumsCoinRegister) {
  const Geometry g = Geometry::square(2, 1);
  WalkState s(g);
  s.set_amplitude({1, -1}, {CoinValue::Plus, CoinValue::Minus}, 0.6);
  s.set_amplitude({1, -1}, {CoinValue::Minus, CoinValue::Minus}, 0.8);
  const Distribution d = distribution(s);
  EXPECT_NEAR(d.at({1, -1}), 1.0, 1e-15);
  EXPECT_NEAR(d.total(), 1.0, 1e-15);
  EXPECT_EQ(d.argmax(), (Position{1, -1}));
}

TEST(Distribution, SizeMismatchThrows) {
  EXPECT_THROW(Distribution(Geometry::square(1, 2), std::vector<double>(4), 0), ConfigError);
}

TEST(Variance, PointMassIsZero) {
  EXPECT_EQ(variance(Distribution::point_mass(Geometry::square(2, 3), {1, 2})), 0.0);
}

TEST(Variance, OneDimensionalExamples) {
  EXPECT_NEAR(variance(make_1d(3, {{-2, 0.25}, {0, 0.5}, {2, 0.25}})), 2.0, 1e-15);
  EXPECT_NEAR(variance(make_1d(3, {{-3, 0.125}, {-1, 0.125}, {1, 0.625}, {3, 0.125}})), 2.75,
              1e-14);
  EXPECT_NEAR(variance(make_1d(3, {{-1, 0.5}, {1, 0.5}})), 1.0, 1e-15);
}

TEST(Variance, TwoDimensionalIsSumOfAxisVariances) {
  const Geometry g = Geometry::square(2, 2);
  std::vector<double> p(g.num_sites(), 0.0);
  // x in {-1, 1} equally (Var 1), y in {0, 2} equally (Var 1).
  p[g.site_index({-1, 0})] = 0.25;
  p[g.site_index({-1, 2})] = 0.25;
  p[g.site_index({1, 0})] = 0.25;
  p[g.site_index({1, 2})] = 0.25;
  EXPECT_NEAR(variance(Distribution(g, p, 0)), 2.0, 1e-15);
}

TEST(Variance, TranslationInvariant) {
  std::mt19937 gen(1);
  std::uniform_real_distribution<double> u;
  const Geometry g = Geometry::square(2, 6);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> p(g.num_sites(), 0.0), q(g.num_sites(), 0.0);
    const int sx = static_cast<int>(gen() % 5) - 2, sy = static_cast<int>(gen() % 5) - 2;
    double total = 0;
    for (int x = -3; x <= 3; ++x) {
      for (int y = -3; y <= 3; ++y) {
        const double w = u(gen);
        p[g.site_index({x, y})] = w;
        q[g.site_index({x + sx, y + sy})] = w;
        total += w;
      }
    }
    for (auto* v : {&p, &q}) {
      for (double& w : *v) w /= total;
    }
    EXPECT_NEAR(variance(Distribution(g, p, 0)), variance(Distribution(g, q, 0)), 1e-12);
  }
}

TEST(Escape, BoundaryLine) {
  EXPECT_EQ((Boundary{4}.line(15)), -11);
  EXPECT_EQ((Boundary{2}.line(10)), -8);
}

TEST(Escape, ThreeStepsFromTheEdge) {
  // |x0 = -t_max, +1>, t_b = 2: only the rightmost peak (x0 + 3) is beyond the line.
  const int t_max = 5;
  const Geometry g = Geometry::for_walk(1, t_max, {-t_max, 0}, 3);
  RandomStream rng(1);
  const auto states = evolve({{-t_max, 0}, {}}, CoinLattice(g), {}, 3, rng);
  EXPECT_NEAR(escape_probability(distribution(states.back()), {2}), 0.125, 1e-15);
}

TEST(Escape, StrictInequality) {
  const Distribution d = make_1d(4, {{-2, 0.5}, {-1, 0.5}});
  EXPECT_NEAR(escape_probability(d, {2}), 0.5, 1e-15);  // line at -2
  EXPECT_NEAR(escape_probability(d, {1}), 1.0, 1e-15);
}

TEST(Escape, LineOutsideLatticeThrows) {
  const Distribution d = make_1d(3, {{0, 1.0}});
  EXPECT_THROW(escape_probability(d, {7}), ConfigError);
  EXPECT_THROW(escape_probability(d, {-1}), ConfigError);
}

TEST(Escape, BoundedAndZeroBeforeTheWalkerCanArrive) {
  std::mt19937 gen(2);
  std::uniform_real_distribution<double> u;
  for (int trial = 0; trial < 30; ++trial) {
    const int dim = 1 + trial % 2;
    const int t_max = 8;
    const int t_b = 1 + trial % 4;
    const Position x0{-t_max, 0};
    const Geometry g = Geometry::for_walk(dim, t_max, x0, t_max);
    const CoinLattice lattice = testing::random_lattice(g, u(gen), x0, gen());
    RandomStream rng(gen());
    const auto states = evolve({x0, {}}, lattice, DephasingSpec(u(gen)), t_max, rng);
    for (const auto& s : states) {
      const double pe = escape_probability(distribution(s), {t_b});
      EXPECT_GE(pe, 0.0);
      EXPECT_LE(pe, 1.0 + 1e-12);
      if (s.time() <= t_b) EXPECT_EQ(pe, 0.0);
    }
  }
}

TEST(MetricSeries, RecordsEveryStep) {
  const Geometry g = Geometry::square(1, 3);
  RandomStream rng(1);
  std::vector<Distribution> snaps{Distribution::point_mass(g, {0, 0})};
  for (const auto& s : evolve({}, CoinLattice(g), {}, 3, rng)) snaps.push_back(distribution(s));
  const MetricSeries with = metric_series(snaps, Boundary{1});
  ASSERT_EQ(with.size(), 4u);
  EXPECT_EQ(with.time.back(), 3);
  EXPECT_NEAR(with.variance[2], 2.0, 1e-14);
  EXPECT_EQ(with.t_b, 1);
  const MetricSeries without = metric_series(snaps, std::nullopt);
  EXPECT_TRUE(std::isnan(without.p_esc[0]));
  EXPECT_FALSE(without.t_b.has_value());
}

}  // namespace
}  // namespace qwalk
