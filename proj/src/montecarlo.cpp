#include "qwalk/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <utility>

#include "qwalk/error.hpp"
#include "qwalk/rng.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

namespace {

// Fixed reduction tree: trials are summed sequentially inside blocks of this
// size, and block sums are merged in block order. Part of the reproducibility
// contract; changing it changes low-order bits of every ensemble statistic.
constexpr std::size_t kTrialsPerBlock = 64;
constexpr std::size_t kBlocksPerWave = 64;

// Neumaier-compensated running sums.
class CompensatedSums {
 public:
  explicit CompensatedSums(std::size_t n = 0) : sum_(n, 0.0), comp_(n, 0.0) {}

  void add(std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double v = values[i];
      const double t = sum_[i] + v;
      if (std::abs(sum_[i]) >= std::abs(v)) {
        comp_[i] += (sum_[i] - t) + v;
      } else {
        comp_[i] += (v - t) + sum_[i];
      }
      sum_[i] = t;
    }
  }

  double value(std::size_t i) const { return sum_[i] + comp_[i]; }

 private:
  std::vector<double> sum_;
  std::vector<double> comp_;
};

// Computes blocks [0, num_blocks) on up to `threads` workers, wave by wave, and
// hands the results to `merge` strictly in block order.
template <class Result, class Compute, class Merge>
void blocked_reduce(std::size_t num_blocks, unsigned threads, Compute compute, Merge merge) {
  for (std::size_t wave = 0; wave < num_blocks; wave += kBlocksPerWave) {
    const std::size_t n = std::min(kBlocksPerWave, num_blocks - wave);
    std::vector<std::optional<Result>> slots(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          slots[i].emplace(compute(wave + i));
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    };
    const auto workers = static_cast<unsigned>(std::min<std::size_t>(std::max(threads, 1U), n));
    if (workers <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
    for (auto& slot : slots) merge(std::move(*slot));
  }
}

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError(std::string(what) + " must lie in [0, 1], got " + std::to_string(p));
  }
}

// Runs single trials of one config. Holds the shared lattice in FixedPerBatch mode.
class TrialRunner {
 public:
  explicit TrialRunner(const ExperimentConfig& config)
      : config_(config), geometry_(config.geometry()), deph_(config.p_d) {
    if (config.lattice_mode == LatticeMode::FixedPerBatch) fixed_.emplace(trial_lattice(config, 0));
  }

  const Geometry& geometry() const noexcept { return geometry_; }

  // visit(t, amplitudes) for t = 0..steps.
  template <class Visit>
  void run(std::uint64_t trial, Visit&& visit) const {
    std::optional<CoinLattice> own;
    if (!fixed_) own.emplace(trial_lattice(config_, trial));
    const CoinLattice& lattice = fixed_ ? *fixed_ : *own;
    RandomStream masks(derive_seed(config_.master_seed, stream::kMask, trial));
    WalkState state = WalkState::localized(geometry_, config_.init);
    Propagator prop(lattice);
    visit(0, std::as_const(state).amplitudes());
    for (int t = 1; t <= config_.steps; ++t) {
      prop.advance(state, deph_, masks);
      visit(t, std::as_const(state).amplitudes());
    }
  }

 private:
  const ExperimentConfig& config_;
  Geometry geometry_;
  DephasingSpec deph_;
  std::optional<CoinLattice> fixed_;
};

struct BlockSums {
  std::vector<double> dist;     // (steps + 1) x sites
  std::vector<double> moments;  // (steps + 1) x 4
  std::vector<double> outer;    // (steps + 1) x 16
  std::vector<double> p_esc;    // steps + 1
  std::vector<double> p_esc_sq;
  std::vector<TrialFinal> finals;
};

}  // namespace

std::string to_string(LatticeMode mode) {
  return mode == LatticeMode::ResamplePerTrial ? "resample_per_trial" : "fixed_per_batch";
}

LatticeMode lattice_mode_from_string(const std::string& s) {
  if (s == "resample_per_trial") return LatticeMode::ResamplePerTrial;
  if (s == "fixed_per_batch") return LatticeMode::FixedPerBatch;
  throw ConfigError("unknown lattice mode '" + s + "'");
}

void ExperimentConfig::validate() const {
  if (dim != 1 && dim != 2) throw ConfigError("dim must be 1 or 2");
  if (t_max < 1) throw ConfigError("t_max must be positive");
  if (steps < 1) throw ConfigError("steps must be positive");
  if (trials < 1) throw ConfigError("trials must be positive");
  check_probability(p, "p");
  check_probability(p_d, "p_d");
  for (CoinValue c : init.c0) coin_from_int(to_int(c));
  if (dim == 1 && init.x0.y != 0) throw ConfigError("1D start must have y = 0");
  const Geometry g = geometry();
  if (t_b && (*t_b < 0 || !g.axis(0).contains(-t_max + *t_b))) {
    throw ConfigError("t_b = " + std::to_string(*t_b) + " puts the boundary outside the lattice");
  }
}

CoinLattice trial_lattice(const ExperimentConfig& config, std::uint64_t trial) {
  const std::uint64_t index = config.lattice_mode == LatticeMode::FixedPerBatch
                                  ? std::numeric_limits<std::uint64_t>::max()
                                  : trial;
  RandomStream rng(derive_seed(config.master_seed, stream::kLattice, index));
  const Position start[] = {config.init.x0};
  return generate_lattice(config.geometry(), config.p, start, rng);
}

EnsembleResult run(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const TrialRunner runner(config);
  const Geometry& g = runner.geometry();
  const std::size_t sites = g.num_sites();
  const auto snapshots = static_cast<std::size_t>(config.steps) + 1;
  const auto trials = static_cast<std::size_t>(config.trials);
  const std::optional<Boundary> boundary =
      config.t_b ? std::optional<Boundary>(Boundary{*config.t_b}) : std::nullopt;
  const int escape_first_x = boundary ? boundary->line(config.t_max) + 1 : 0;
  const auto cps = static_cast<std::size_t>(g.coins_per_site());

  auto compute = [&](std::size_t block) {
    BlockSums sums;
    sums.dist.assign(snapshots * sites, 0.0);
    sums.moments.assign(snapshots * 4, 0.0);
    sums.outer.assign(snapshots * 16, 0.0);
    sums.p_esc.assign(snapshots, 0.0);
    sums.p_esc_sq.assign(snapshots, 0.0);
    const std::size_t first = block * kTrialsPerBlock;
    const std::size_t last = std::min(first + kTrialsPerBlock, trials);
    for (std::size_t k = first; k < last; ++k) {
      TrialFinal final_obs;
      runner.run(k, [&](int t, std::span<const double> amps) {
        const auto ti = static_cast<std::size_t>(t);
        double* dist = sums.dist.data() + ti * sites;
        std::array<double, 4> v{};
        double esc = 0.0;
        std::size_t site = 0;
        for (int x = g.axis(0).lo; x <= g.axis(0).hi; ++x) {
          const double dx = x - config.init.x0.x;
          for (int y = g.axis(1).lo; y <= g.axis(1).hi; ++y, ++site) {
            double pr = 0.0;
            for (std::size_t s = 0; s < cps; ++s) pr += amps[site * cps + s] * amps[site * cps + s];
            if (pr == 0.0) continue;
            dist[site] += pr;
            const double dy = y - config.init.x0.y;
            v[0] += pr * dx;
            v[1] += pr * dx * dx;
            v[2] += pr * dy;
            v[3] += pr * dy * dy;
            if (boundary && x >= escape_first_x) esc += pr;
          }
        }
        for (std::size_t i = 0; i < 4; ++i) {
          sums.moments[ti * 4 + i] += v[i];
          for (std::size_t j = 0; j < 4; ++j) sums.outer[ti * 16 + i * 4 + j] += v[i] * v[j];
        }
        sums.p_esc[ti] += esc;
        sums.p_esc_sq[ti] += esc * esc;
        if (t == config.steps) final_obs = {esc, v};
      });
      sums.finals.push_back(final_obs);
    }
    return sums;
  };

  CompensatedSums dist(snapshots * sites);
  CompensatedSums moments(snapshots * 4);
  CompensatedSums outer(snapshots * 16);
  CompensatedSums p_esc(snapshots);
  CompensatedSums p_esc_sq(snapshots);
  EnsembleResult result;
  result.config = config;
  result.finals.reserve(trials);
  const std::size_t blocks = (trials + kTrialsPerBlock - 1) / kTrialsPerBlock;
  blocked_reduce<BlockSums>(blocks, options.threads, compute, [&](BlockSums&& b) {
    dist.add(b.dist);
    moments.add(b.moments);
    outer.add(b.outer);
    p_esc.add(b.p_esc);
    p_esc_sq.add(b.p_esc_sq);
    result.finals.insert(result.finals.end(), b.finals.begin(), b.finals.end());
  });

  const double n = static_cast<double>(trials);
  const double bessel = trials > 1 ? n / (n - 1.0) : 0.0;
  MetricSeries& m = result.metrics;
  m.p = config.p;
  m.p_d = config.p_d;
  m.t_max = config.t_max;
  m.t_b = config.t_b;
  m.trials = config.trials;
  for (std::size_t t = 0; t < snapshots; ++t) {
    std::vector<double> probs(sites);
    for (std::size_t i = 0; i < sites; ++i) probs[i] = dist.value(t * sites + i) / n;
    Distribution avg(g, std::move(probs), static_cast<int>(t));

    std::array<double, 4> mean{};
    for (std::size_t i = 0; i < 4; ++i) mean[i] = moments.value(t * 4 + i) / n;
    const std::array<double, 4> grad{-2.0 * mean[0], 1.0, -2.0 * mean[2], 1.0};
    double quad = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        const double cov = (outer.value(t * 16 + i * 4 + j) / n - mean[i] * mean[j]) * bessel;
        quad += grad[i] * cov * grad[j];
      }
    }
    m.time.push_back(static_cast<int>(t));
    m.variance.push_back(variance(avg));
    m.stderr_variance.push_back(std::sqrt(std::max(quad, 0.0) / n));
    if (boundary) {
      const double mean_esc = p_esc.value(t) / n;
      const double var_esc = (p_esc_sq.value(t) / n - mean_esc * mean_esc) * bessel;
      m.p_esc.push_back(escape_probability(avg, *boundary));
      m.stderr_p_esc.push_back(std::sqrt(std::max(var_esc, 0.0) / n));
    } else {
      m.p_esc.push_back(std::numeric_limits<double>::quiet_NaN());
      m.stderr_p_esc.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    result.distributions.push_back(std::move(avg));
  }
  return result;
}

std::vector<ExperimentConfig> sweep_configs(std::span<const ExperimentConfig> configs,
                                            std::uint64_t master_seed) {
  std::vector<ExperimentConfig> seeded(configs.begin(), configs.end());
  for (std::size_t i = 0; i < seeded.size(); ++i) {
    seeded[i].master_seed = derive_seed(master_seed, stream::kSweep, i);
  }
  return seeded;
}

std::vector<EnsembleResult> sweep(std::span<const ExperimentConfig> configs,
                                  std::uint64_t master_seed, const RunOptions& options) {
  if (configs.empty()) throw PreconditionError("sweep needs at least one config");
  const auto seeded = sweep_configs(configs, master_seed);
  for (const auto& c : seeded) c.validate();
  std::vector<EnsembleResult> results;
  results.reserve(seeded.size());
  for (const auto& c : seeded) results.push_back(run(c, options));
  return results;
}

Eigen::MatrixXd estimate_density(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const TrialRunner runner(config);
  const auto m = static_cast<Eigen::Index>(runner.geometry().basis_size());
  const auto trials = static_cast<std::size_t>(config.trials);
  auto compute = [&](std::size_t block) {
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(m, m);
    const std::size_t first = block * kTrialsPerBlock;
    const std::size_t last = std::min(first + kTrialsPerBlock, trials);
    for (std::size_t k = first; k < last; ++k) {
      runner.run(k, [&](int t, std::span<const double> amps) {
        if (t != config.steps) return;
        const Eigen::Map<const Eigen::VectorXd> psi(amps.data(), m);
        sum.noalias() += psi * psi.transpose();
      });
    }
    return sum;
  };
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(m, m);
  const std::size_t blocks = (trials + kTrialsPerBlock - 1) / kTrialsPerBlock;
  blocked_reduce<Eigen::MatrixXd>(blocks, options.threads, compute,
                                  [&](Eigen::MatrixXd&& b) { total += b; });
  return total / static_cast<double>(trials);
}

namespace {

void check_paired(const EnsembleResult& a, const EnsembleResult& b) {
  if (a.finals.size() != b.finals.size() || a.finals.empty()) {
    throw ConfigError("paired comparison needs ensembles with equal, nonzero trial counts");
  }
}

std::array<double, 4> variance_gradient(const EnsembleResult& r) {
  std::array<double, 4> mean{};
  for (const auto& f : r.finals) {
    for (std::size_t i = 0; i < 4; ++i) mean[i] += f.moments[i];
  }
  for (double& v : mean) v /= static_cast<double>(r.finals.size());
  return {-2.0 * mean[0], 1.0, -2.0 * mean[2], 1.0};
}

Estimate paired(const std::vector<double>& diffs, double value) {
  const double n = static_cast<double>(diffs.size());
  double mean = 0.0;
  for (double d : diffs) mean += d;
  mean /= n;
  double ss = 0.0;
  for (double d : diffs) ss += (d - mean) * (d - mean);
  const double var = diffs.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {value, std::sqrt(var / n)};
}

}  // namespace

Estimate paired_variance_difference(const EnsembleResult& a, const EnsembleResult& b) {
  check_paired(a, b);
  const auto ga = variance_gradient(a);
  const auto gb = variance_gradient(b);
  std::vector<double> diffs(a.finals.size());
  for (std::size_t k = 0; k < diffs.size(); ++k) {
    double d = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      d += ga[i] * a.finals[k].moments[i] - gb[i] * b.finals[k].moments[i];
    }
    diffs[k] = d;
  }
  return paired(diffs, a.metrics.variance.back() - b.metrics.variance.back());
}

Estimate paired_escape_difference(const EnsembleResult& a, const EnsembleResult& b) {
  check_paired(a, b);
  std::vector<double> diffs(a.finals.size());
  for (std::size_t k = 0; k < diffs.size(); ++k) diffs[k] = a.finals[k].p_esc - b.finals[k].p_esc;
  return paired(diffs, a.metrics.p_esc.back() - b.metrics.p_esc.back());
}

Estimate independent_variance_difference(const EnsembleResult& a, const EnsembleResult& b) {
  const double sa = a.metrics.stderr_variance.back();
  const double sb = b.metrics.stderr_variance.back();
  return {a.metrics.variance.back() - b.metrics.variance.back(), std::hypot(sa, sb)};
}

Estimate independent_escape_difference(const EnsembleResult& a, const EnsembleResult& b) {
  const double sa = a.metrics.stderr_p_esc.back();
  const double sb = b.metrics.stderr_p_esc.back();
  return {a.metrics.p_esc.back() - b.metrics.p_esc.back(), std::hypot(sa, sb)};
}

}  // namespace qwalk
