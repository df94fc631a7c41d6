#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "brute_force.hpp"
#include "qwalk/error.hpp"
#include "qwalk/metrics.hpp"
#include "qwalk/oracle.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {
namespace {

using oracle::DensityMatrix;

Eigen::MatrixXd random_density(int m, std::mt19937& gen) {
  std::normal_distribution<double> n;
  Eigen::MatrixXd a(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) a(i, j) = n(gen);
  }
  Eigen::MatrixXd rho = a * a.transpose();
  return rho / rho.trace();
}

ExperimentConfig config(int dim, int t_max, double p, double p_d) {
  ExperimentConfig c;
  c.dim = dim;
  c.t_max = t_max;
  c.steps = t_max;
  c.p = p;
  c.p_d = p_d;
  c.trials = 1;
  return c;
}

TEST(Channel, TwoByTwoExample) {
  Eigen::MatrixXd rho(2, 2);
  rho << 0.5, 0.5, 0.5, 0.5;
  const double p_d = 0.1;
  // Four masks by hand: (+,+) and (-,-) keep the coherence, the others negate it.
  const double by_hand = 0.5 * ((1 - p_d) * (1 - p_d) + p_d * p_d - 2 * p_d * (1 - p_d));
  EXPECT_NEAR(by_hand, 0.32, 1e-15);
  const Eigen::MatrixXd out = oracle::dephase_channel(DensityMatrix(rho), p_d).matrix();
  EXPECT_NEAR(out(0, 1), 0.32, 1e-15);
  EXPECT_NEAR(out(1, 0), 0.32, 1e-15);
  EXPECT_NEAR(out(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(oracle::dephase_mixture_exhaustive(rho, p_d)(0, 1), 0.32, 1e-15);
}

TEST(Channel, HalfDephasingIsFullyDiagonal) {
  std::mt19937 gen(1);
  const Eigen::MatrixXd rho = random_density(6, gen);
  const Eigen::MatrixXd out = oracle::dephase_channel(DensityMatrix(rho), 0.5).matrix();
  EXPECT_EQ((out - Eigen::MatrixXd(rho.diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Channel, NoDephasingIsIdentity) {
  std::mt19937 gen(2);
  const Eigen::MatrixXd rho = random_density(5, gen);
  EXPECT_EQ((oracle::dephase_channel(DensityMatrix(rho), 0.0).matrix() - rho).norm(), 0.0);
}

TEST(Channel, ScalingMatchesMixtureAndDynamicalMatrix) {
  std::mt19937 gen(3);
  for (int m : {1, 2, 3, 5, 8, 12}) {
    for (double p_d : {0.0, 0.1, 0.25, 0.5, 0.9, 1.0}) {
      const Eigen::MatrixXd rho = random_density(m, gen);
      const Eigen::MatrixXd scaled = oracle::dephase_channel(DensityMatrix(rho), p_d).matrix();
      const Eigen::MatrixXd mixture = oracle::dephase_mixture_exhaustive(rho, p_d);
      EXPECT_LT((scaled - mixture).cwiseAbs().maxCoeff(), 1e-12) << "m=" << m << " p_d=" << p_d;
      const Eigen::VectorXd via_d =
          oracle::dynamical_matrix(static_cast<std::size_t>(m), p_d) * oracle::vectorize(rho);
      EXPECT_LT((via_d - oracle::vectorize(scaled)).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Channel, PreservesTraceAndPositivity) {
  std::mt19937 gen(4);
  for (double p_d : {0.0, 0.3, 0.5, 0.77}) {
    const DensityMatrix out = oracle::dephase_channel(DensityMatrix(random_density(10, gen)), p_d);
    EXPECT_NEAR(out.trace(), 1.0, 1e-12);
    EXPECT_NO_THROW(out.validate());
  }
}

TEST(Channel, CapacityLimits) {
  EXPECT_THROW(oracle::dephase_mixture_exhaustive(Eigen::MatrixXd::Identity(17, 17) / 17, 0.1),
               CapacityError);
  EXPECT_THROW(oracle::dynamical_matrix(13, 0.1), CapacityError);
}

TEST(DensityMatrix, ValidationRejectsNonStates) {
  Eigen::MatrixXd asym(2, 2);
  asym << 0.5, 0.1, 0.2, 0.5;
  EXPECT_THROW(DensityMatrix(asym).validate(), ValidationError);
  EXPECT_THROW(DensityMatrix(Eigen::MatrixXd::Identity(2, 2)).validate(), ValidationError);
  Eigen::MatrixXd neg(2, 2);
  neg << 1.5, 0.0, 0.0, -0.5;
  EXPECT_THROW(DensityMatrix(neg).validate(), ValidationError);
  EXPECT_THROW(oracle::dephase_channel(DensityMatrix(neg), 0.1), ValidationError);
  EXPECT_THROW(oracle::dephase_channel(DensityMatrix(Eigen::MatrixXd::Identity(2, 2) / 2), 1.5),
               ConfigError);
}

TEST(DensityEvolution, NoiselessStaysPureAndMatchesTrajectory) {
  const ExperimentConfig c = config(1, 4, 0.7, 0.0);
  const CoinLattice lattice = trial_lattice(c, 0);
  const auto rhos = oracle::evolve_density(c, lattice);
  RandomStream rng(1);
  const auto states = evolve(c.init, lattice, {}, c.steps, rng);
  ASSERT_EQ(rhos.size(), states.size() + 1);
  for (std::size_t t = 1; t < rhos.size(); ++t) {
    const auto amps = states[t - 1].amplitudes();
    const Eigen::VectorXd psi = Eigen::Map<const Eigen::VectorXd>(amps.data(), amps.size());
    EXPECT_LT((rhos[t].matrix() - psi * psi.transpose()).norm(), 1e-12);
    EXPECT_NEAR(rhos[t].purity(), 1.0, 1e-12);
  }
}

TEST(DensityEvolution, OneStepScalesCoherences) {
  const ExperimentConfig noiseless = config(1, 3, 1.0, 0.0);
  ExperimentConfig noisy = noiseless;
  noisy.p_d = 0.1;
  const CoinLattice lattice(noiseless.geometry());
  const auto a = oracle::evolve_density(noiseless, lattice);
  const auto b = oracle::evolve_density(noisy, lattice);
  const Eigen::MatrixXd& ra = a[1].matrix();
  const Eigen::MatrixXd& rb = b[1].matrix();
  const double f = 0.8 * 0.8;
  for (Eigen::Index i = 0; i < ra.rows(); ++i) {
    for (Eigen::Index j = 0; j < ra.cols(); ++j) {
      EXPECT_NEAR(rb(i, j), i == j ? ra(i, j) : f * ra(i, j), 1e-15);
    }
  }
}

TEST(DensityEvolution, HalfDephasingDiagonalIsTheClassicalWalk) {
  for (int dim : {1, 2}) {
    const ExperimentConfig c = config(dim, 3, 0.7, 0.5);
    const CoinLattice lattice = trial_lattice(c, 0);
    const auto rhos = oracle::evolve_density(c, lattice, {dim == 1 ? 64u : 256u});
    const auto classical = oracle::classical_distributions(c, lattice);
    for (int t = 0; t <= c.steps; ++t) {
      const Distribution d =
          oracle::diagonal_distribution(rhos[static_cast<std::size_t>(t)], c.geometry(), t);
      EXPECT_LT(oracle::total_variation(d, classical[static_cast<std::size_t>(t)]), 1e-12);
    }
  }
}

TEST(DensityEvolution, TraceIsKeptForAnyDephasing) {
  for (double p_d : {0.0, 0.05, 0.5, 0.8}) {
    const ExperimentConfig c = config(1, 4, 0.6, p_d);
    for (const auto& rho : oracle::evolve_density(c, trial_lattice(c, 0))) {
      EXPECT_NEAR(rho.trace(), 1.0, 1e-12);
      EXPECT_NO_THROW(rho.validate());
    }
  }
}

TEST(DensityEvolution, CapacityErrorAboveTheLimit) {
  const ExperimentConfig c = config(2, 50, 1.0, 0.1);
  EXPECT_THROW(oracle::evolve_density(c, CoinLattice(c.geometry())), CapacityError);
}

TEST(Classical, TwoStepsFromOrigin) {
  const ExperimentConfig c = config(1, 3, 1.0, 0.5);
  const auto ds = oracle::classical_distributions(c, CoinLattice(c.geometry()));
  ASSERT_EQ(ds.size(), 4u);
  EXPECT_EQ(ds[0].at({0, 0}), 1.0);
  EXPECT_NEAR(ds[2].at({-2, 0}), 0.25, 1e-15);
  EXPECT_NEAR(ds[2].at({0, 0}), 0.5, 1e-15);
  EXPECT_NEAR(ds[2].at({2, 0}), 0.25, 1e-15);
}

TEST(Classical, MatchesPathEnumeration) {
  std::mt19937 gen(6);
  for (int dim : {1, 2}) {
    for (int trial = 0; trial < 6; ++trial) {
      const int t = dim == 1 ? 8 : 6 + trial % 3;
      ExperimentConfig c = config(dim, t, 0.6, 0.5);
      c.init.c0 = {trial % 2 ? CoinValue::Minus : CoinValue::Plus, CoinValue::Minus};
      const CoinLattice lattice = testing::random_lattice(c.geometry(), 0.6, {0, 0}, gen());
      std::map<std::array<int, 2>, double> ref;
      testing::enumerate_paths(lattice, {0, 0}, {to_int(c.init.c0[0]), to_int(c.init.c0[1])}, t,
                               1.0, ref);
      const Distribution d = oracle::classical_walk(c, lattice);
      double covered = 0;
      for (const auto& [xy, prob] : ref) {
        EXPECT_NEAR(d.at({xy[0], xy[1]}), prob, 1e-14);
        covered += d.at({xy[0], xy[1]});
      }
      EXPECT_NEAR(covered, 1.0, 1e-12);
    }
  }
}

TEST(Classical, OpenLatticeVarianceIsLinear) {
  const ExperimentConfig c = config(2, 20, 1.0, 0.5);
  const auto ds = oracle::classical_distributions(c, CoinLattice(c.geometry()));
  // Least squares fit of variance against t; both axes diffuse independently.
  double st = 0, sv = 0, stt = 0, stv = 0, svv = 0;
  const double n = static_cast<double>(ds.size());
  for (const auto& d : ds) {
    const double t = d.time(), v = variance(d);
    EXPECT_NEAR(v, 2.0 * t, 1e-9);
    st += t, sv += v, stt += t * t, stv += t * v, svv += v * v;
  }
  const double r = (n * stv - st * sv) / std::sqrt((n * stt - st * st) * (n * svv - sv * sv));
  EXPECT_GT(r * r, 0.999);
}

TEST(Classical, SampledWalkersAgreeWithDynamicProgramming) {
  ExperimentConfig c = config(2, 6, 0.7, 0.5);
  const CoinLattice lattice = trial_lattice(c, 3);
  RandomStream rng(8);
  const Distribution sampled = oracle::classical_walk_sampled(c, lattice, 40000, rng);
  EXPECT_LT(oracle::total_variation(sampled, oracle::classical_walk(c, lattice)), 0.03);
}

TEST(Classical, WalkerReversesOnDefects) {
  const Geometry g = Geometry::square(1, 4);
  std::vector<CoinKind> kinds(g.num_sites(), CoinKind::Hadamard);
  kinds[g.site_index({1, 0})] = CoinKind::BitFlip;
  const CoinLattice lattice(g, kinds, 0.5, 0);
  oracle::ClassicalWalker w(lattice, {{1, 0}, {CoinValue::Plus, CoinValue::Plus}});
  RandomStream rng(1);
  w.step(rng);
  EXPECT_EQ(w.position(), (Position{0, 0}));
  EXPECT_EQ(w.coins()[0], CoinValue::Minus);
}

TEST(TotalVariation, Examples) {
  const Geometry g = Geometry::square(1, 2);
  const Distribution a(g, {0, 0.5, 0, 0.5, 0}, 0);
  const Distribution b(g, {0, 0, 1.0, 0, 0}, 0);
  EXPECT_NEAR(oracle::total_variation(a, b), 1.0, 1e-15);
  EXPECT_EQ(oracle::total_variation(a, a), 0.0);
  const Distribution c(g, {0, 0.25, 0.5, 0.25, 0}, 0);
  EXPECT_NEAR(oracle::total_variation(a, c), 0.5, 1e-15);
  EXPECT_THROW(oracle::total_variation(a, Distribution::point_mass(Geometry::square(1, 3), {0, 0})),
               ValidationError);
}

}  // namespace
}  // namespace qwalk
