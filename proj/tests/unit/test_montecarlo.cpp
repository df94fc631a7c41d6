#include <gtest/gtest.h>

#include <cmath>

#include "qwalk/error.hpp"
#include "qwalk/montecarlo.hpp"
#include "qwalk/oracle.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {
namespace {

ExperimentConfig config(int dim, int t_max, double p, double p_d, int trials) {
  ExperimentConfig c;
  c.dim = dim;
  c.t_max = t_max;
  c.steps = t_max;
  c.p = p;
  c.p_d = p_d;
  c.trials = trials;
  c.master_seed = 12345;
  return c;
}

ExperimentConfig escape_config(double p, double p_d, int trials) {
  ExperimentConfig c = config(2, 10, p, p_d, trials);
  c.init.x0 = {-10, 0};
  c.t_b = 2;
  return c;
}

void expect_identical(const EnsembleResult& a, const EnsembleResult& b) {
  ASSERT_EQ(a.distributions.size(), b.distributions.size());
  for (std::size_t t = 0; t < a.distributions.size(); ++t) {
    const auto pa = a.distributions[t].probs(), pb = b.distributions[t].probs();
    for (std::size_t i = 0; i < pa.size(); ++i) ASSERT_EQ(pa[i], pb[i]);
    EXPECT_EQ(a.metrics.variance[t], b.metrics.variance[t]);
    EXPECT_EQ(a.metrics.stderr_variance[t], b.metrics.stderr_variance[t]);
  }
}

TEST(Config, Validation) {
  ExperimentConfig c = config(2, 10, 1.0, 0.0, 10);
  EXPECT_NO_THROW(c.validate());
  auto bad = [&](auto mutate) {
    ExperimentConfig b = c;
    mutate(b);
    EXPECT_THROW(b.validate(), ConfigError);
  };
  bad([](ExperimentConfig& b) { b.dim = 3; });
  bad([](ExperimentConfig& b) { b.t_max = 0; });
  bad([](ExperimentConfig& b) { b.steps = 11; });
  bad([](ExperimentConfig& b) { b.trials = 0; });
  bad([](ExperimentConfig& b) { b.p = 1.2; });
  bad([](ExperimentConfig& b) { b.p_d = -0.5; });
  bad([](ExperimentConfig& b) { b.t_b = 25; });
  bad([](ExperimentConfig& b) { b.init.x0 = {11, 0}; });
}

TEST(Config, LatticeModeNames) {
  EXPECT_EQ(to_string(LatticeMode::FixedPerBatch), "fixed_per_batch");
  EXPECT_EQ(lattice_mode_from_string("resample_per_trial"), LatticeMode::ResamplePerTrial);
  EXPECT_THROW(lattice_mode_from_string("sometimes"), ConfigError);
}

TEST(TrialLattice, ProtectsStartAndFollowsMode) {
  ExperimentConfig c = config(2, 6, 0.0, 0.0, 4);
  c.steps = 4;
  c.init.x0 = {2, -1};
  EXPECT_EQ(trial_lattice(c, 0).at({2, -1}), CoinKind::Hadamard);
  EXPECT_EQ(trial_lattice(c, 0).defect_count(), c.geometry().num_sites() - 1);
  c.p = 0.5;
  EXPECT_FALSE(trial_lattice(c, 0) == trial_lattice(c, 1));
  c.lattice_mode = LatticeMode::FixedPerBatch;
  EXPECT_EQ(trial_lattice(c, 0), trial_lattice(c, 1));
}

TEST(TrialLattice, IndependentOfDephasing) {
  ExperimentConfig a = config(2, 6, 0.6, 0.0, 4);
  ExperimentConfig b = a;
  b.p_d = 0.5;
  for (std::uint64_t k = 0; k < 4; ++k) EXPECT_EQ(trial_lattice(a, k), trial_lattice(b, k));
}

TEST(Run, SingleNoiselessTrialEqualsEvolve) {
  const ExperimentConfig c = config(2, 6, 1.0, 0.0, 1);
  const EnsembleResult r = run(c);
  RandomStream rng(0);
  const auto states = evolve(c.init, CoinLattice(c.geometry()), {}, c.steps, rng);
  ASSERT_EQ(r.distributions.size(), states.size() + 1);
  EXPECT_EQ(r.distributions[0].at({0, 0}), 1.0);
  for (std::size_t t = 1; t < r.distributions.size(); ++t) {
    const Distribution d = distribution(states[t - 1]);
    for (std::size_t i = 0; i < d.probs().size(); ++i) {
      EXPECT_EQ(r.distributions[t].probs()[i], d.probs()[i]);
    }
    EXPECT_EQ(r.metrics.stderr_variance[t], 0.0);
  }
}

TEST(Run, AveragesAreNormalizedWithNonnegativeErrors) {
  const EnsembleResult r = run(escape_config(0.7, 0.05, 130));
  for (std::size_t t = 0; t < r.distributions.size(); ++t) {
    EXPECT_NEAR(r.distributions[t].total(), 1.0, 1e-12);
    EXPECT_GE(r.metrics.stderr_variance[t], 0.0);
    EXPECT_GE(r.metrics.stderr_p_esc[t], 0.0);
    EXPECT_GE(r.metrics.p_esc[t], 0.0);
    EXPECT_LE(r.metrics.p_esc[t], 1.0 + 1e-12);
  }
  EXPECT_EQ(r.finals.size(), 130u);
  EXPECT_EQ(r.metrics.p_esc[2], 0.0);
}

TEST(Run, SameSeedReproducesBitForBit) {
  const ExperimentConfig c = config(2, 5, 0.8, 0.1, 200);
  expect_identical(run(c), run(c));
}

TEST(Run, ThreadCountDoesNotChangeResults) {
  const ExperimentConfig c = config(2, 5, 0.8, 0.1, 300);
  expect_identical(run(c, {1}), run(c, {3}));
}

TEST(Run, DifferentSeedsDiffer) {
  ExperimentConfig a = config(1, 6, 0.8, 0.1, 50);
  ExperimentConfig b = a;
  b.master_seed = 54321;
  EXPECT_NE(run(a).metrics.variance.back(), run(b).metrics.variance.back());
}

// Summing the trials by hand in reverse order reproduces the ensemble average.
TEST(Run, TrialOrderOnlyAffectsRounding) {
  const ExperimentConfig c = config(1, 6, 0.7, 0.2, 70);
  const EnsembleResult r = run(c);
  const Geometry g = c.geometry();
  std::vector<double> sum(g.num_sites(), 0.0);
  for (int k = c.trials - 1; k >= 0; --k) {
    const auto trial = static_cast<std::uint64_t>(k);
    RandomStream masks(derive_seed(c.master_seed, stream::kMask, trial));
    const auto states = evolve(c.init, trial_lattice(c, trial), DephasingSpec(c.p_d), c.steps, masks);
    const Distribution d = distribution(states.back());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += d.probs()[i];
  }
  for (std::size_t i = 0; i < sum.size(); ++i) {
    EXPECT_NEAR(r.distributions.back().probs()[i], sum[i] / c.trials, 1e-12);
  }
}

TEST(Run, HalfDephasingMatchesTheClassicalWalk) {
  ExperimentConfig c = config(1, 10, 0.7, 0.5, 20000);
  c.lattice_mode = LatticeMode::FixedPerBatch;
  const EnsembleResult r = run(c);
  const Distribution exact = oracle::classical_walk(c, trial_lattice(c, 0));
  EXPECT_LT(oracle::total_variation(r.distributions.back(), exact), 0.03);
}

TEST(Run, EnsembleDensityApproachesTheExactState) {
  ExperimentConfig c = config(1, 3, 0.8, 0.2, 20000);
  c.lattice_mode = LatticeMode::FixedPerBatch;
  const Eigen::MatrixXd est = estimate_density(c);
  const auto exact = oracle::evolve_density(c, trial_lattice(c, 0));
  EXPECT_LT((est - exact.back().matrix()).norm(), 0.03);
  EXPECT_NEAR(est.trace(), 1.0, 1e-12);
}

TEST(Sweep, EmptyGridIsRejected) {
  EXPECT_THROW(sweep({}, 1), PreconditionError);
}

TEST(Sweep, DerivesOneSeedPerConfig) {
  const std::vector<ExperimentConfig> cs{config(1, 4, 1.0, 0.0, 1), config(1, 4, 1.0, 0.0, 1)};
  const auto seeded = sweep_configs(cs, 7);
  EXPECT_EQ(seeded[0].master_seed, derive_seed(7, stream::kSweep, 0));
  EXPECT_EQ(seeded[1].master_seed, derive_seed(7, stream::kSweep, 1));
  const auto results = sweep(cs, 7);
  ASSERT_EQ(results.size(), 2u);
  EXPECT_EQ(results[1].config.master_seed, seeded[1].master_seed);
}

TEST(Sweep, EscapeFallsWithDefects) {
  const std::vector<ExperimentConfig> cs{escape_config(1.0, 0.0, 1), escape_config(0.9, 0.0, 400),
                                         escape_config(0.7, 0.0, 400)};
  const auto r = sweep(cs, 99);
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    const Estimate d = independent_escape_difference(r[i], r[i + 1]);
    EXPECT_GT(d.value, 5 * d.std_error) << "p index " << i;
  }
}

TEST(Paired, DephasingSlowsTheSpread) {
  const ExperimentConfig q = config(2, 8, 1.0, 0.0, 300);
  ExperimentConfig cl = q;
  cl.p_d = 0.5;
  const Estimate d = paired_variance_difference(run(q), run(cl));
  EXPECT_GT(d.value, 5 * d.std_error);
}

TEST(Paired, QuantumEscapesFasterOnTheSameLattices) {
  ExperimentConfig q = config(2, 15, 0.7, 0.0, 300);
  q.init.x0 = {-15, 0};
  q.t_b = 4;
  ExperimentConfig cl = q;
  cl.p_d = 0.5;
  const EnsembleResult rq = run(q), rc = run(cl);
  for (int t = 0; t <= 4; ++t) EXPECT_EQ(rq.metrics.p_esc[t], 0.0);
  EXPECT_GT(rq.metrics.p_esc[5], 0.0);
  // At t = 5, 6 only the extreme tail has escaped and both walks put the same
  // weight there; from t = 7 on the quantum curve is ahead.
  for (int t = 7; t <= 15; ++t) {
    const double se = std::hypot(rq.metrics.stderr_p_esc[t], rc.metrics.stderr_p_esc[t]);
    EXPECT_GT(rq.metrics.p_esc[t] - rc.metrics.p_esc[t], 5 * se) << "t=" << t;
  }
  const Estimate d = paired_escape_difference(rq, rc);
  EXPECT_GT(d.value, 5 * d.std_error);
}

TEST(Paired, MismatchedTrialCountsThrow) {
  EXPECT_THROW(paired_escape_difference(run(escape_config(0.7, 0.0, 3)),
                                        run(escape_config(0.7, 0.0, 4))),
               ConfigError);
}

}  // namespace
}  // namespace qwalk
