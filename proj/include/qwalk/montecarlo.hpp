#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qwalk/lattice.hpp"
#include "qwalk/metrics.hpp"
#include "qwalk/walk_state.hpp"

namespace qwalk {

enum class LatticeMode { ResamplePerTrial, FixedPerBatch };

std::string to_string(LatticeMode mode);
LatticeMode lattice_mode_from_string(const std::string& s);

/// Everything that determines an ensemble run.
struct ExperimentConfig {
  int dim = 2;
  int t_max = 10;
  int steps = 10;
  InitialState init{};
  double p = 1.0;     // site-open probability
  double p_d = 0.0;   // dephasing probability
  std::optional<int> t_b;
  int trials = 1000;
  LatticeMode lattice_mode = LatticeMode::ResamplePerTrial;
  std::uint64_t master_seed = 0;

  /// Throws ConfigError on any violated constraint, including a light cone
  /// that does not fit the lattice.
  void validate() const;

  /// Allocated state space (see Geometry::for_walk).
  Geometry geometry() const { return Geometry::for_walk(dim, t_max, init.x0, steps); }
};

/// The lattice trial `trial` runs on. In FixedPerBatch mode every trial shares
/// one lattice. The start site is always protected.
CoinLattice trial_lattice(const ExperimentConfig& config, std::uint64_t trial);

struct RunOptions {
  /// Worker threads. Results do not depend on this value.
  unsigned threads = 1;
};

/// Final-step observables of a single trial, kept for paired comparisons
/// between ensembles that share lattices. Moments are raw moments of the
/// trial's own distribution in coordinates relative to the start site.
struct TrialFinal {
  double p_esc = 0.0;
  std::array<double, 4> moments{};
};

struct EnsembleResult {
  ExperimentConfig config;
  /// Trial-averaged distribution for t = 0..steps (index = time).
  std::vector<Distribution> distributions;
  /// variance[t] is the variance of distributions[t]; p_esc[t] its escape
  /// probability. Standard errors by the delta method over trials.
  MetricSeries metrics;
  std::vector<TrialFinal> finals;
};

EnsembleResult run(const ExperimentConfig& config, const RunOptions& options = {});

/// config i runs with master seed derive_seed(master_seed, stream::kSweep, i).
std::vector<ExperimentConfig> sweep_configs(std::span<const ExperimentConfig> configs,
                                            std::uint64_t master_seed);
std::vector<EnsembleResult> sweep(std::span<const ExperimentConfig> configs,
                                  std::uint64_t master_seed, const RunOptions& options = {});

/// Trial average of |psi><psi| at the final step. Uses the same trial streams
/// as run(), so it estimates the mixed state whose diagonal run() reports.
Eigen::MatrixXd estimate_density(const ExperimentConfig& config, const RunOptions& options = {});

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Final-step variance(a) - variance(b), with a paired standard error. Both
/// ensembles must have the same trial count (and normally the same master seed,
/// so that trial k uses the same lattice in both).
Estimate paired_variance_difference(const EnsembleResult& a, const EnsembleResult& b);
Estimate paired_escape_difference(const EnsembleResult& a, const EnsembleResult& b);

/// Final-step difference of independent ensembles, se = sqrt(se_a^2 + se_b^2).
Estimate independent_variance_difference(const EnsembleResult& a, const EnsembleResult& b);
Estimate independent_escape_difference(const EnsembleResult& a, const EnsembleResult& b);

}  // namespace qwalk
