// qwalk: command-line driver for coined walks on congested lattices.
//
//   qwalk evolve      single trajectory, per-step distributions and metrics
//   qwalk experiment  Monte Carlo ensembles from flags or a JSON plan
//   qwalk preset      figure reproductions (fig1..fig5)
//   qwalk oracle      exact density-matrix evolution and channel report
//
// Exit codes: 0 success, 2 configuration error, 3 capacity error, 4 I/O error.
// Output goes to --out, else $QWALK_OUTPUT_DIR, else the working directory.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qwalk/error.hpp"
#include "qwalk/io.hpp"
#include "qwalk/lattice.hpp"
#include "qwalk/metrics.hpp"
#include "qwalk/montecarlo.hpp"
#include "qwalk/oracle.hpp"
#include "qwalk/presets.hpp"
#include "qwalk/walk.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qwalk;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitIo = 4;

struct WalkFlags {
  std::string config_file;
  int dim = 1;
  int t_max = 10;
  std::optional<int> steps;
  double p = 1.0;
  double p_d = 0.0;
  std::string input;
  std::optional<int> t_b;
  int trials = 1000;
  std::string lattice_mode = "resample_per_trial";
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string name;
  unsigned threads = std::max(1U, std::thread::hardware_concurrency());
};

void add_walk_flags(CLI::App* cmd, WalkFlags& f) {
  cmd->add_option("--config", f.config_file, "JSON experiment plan or config")->check(CLI::ExistingFile);
  cmd->add_option("--dim", f.dim, "Lattice dimension (1 or 2)");
  cmd->add_option("--tmax", f.t_max, "Lattice half-width");
  cmd->add_option("--steps", f.steps, "Number of steps (default: tmax)");
  cmd->add_option("--p", f.p, "Probability that a site is open");
  cmd->add_option("--pd", f.p_d, "Dephasing (sign flip) probability");
  cmd->add_option("--input", f.input, "Start state x[,y],c[,cy] (default: origin, coins +1)");
  cmd->add_option("--tb", f.t_b, "Escape boundary offset from the left edge");
  cmd->add_option("--seed", f.seed, "Master seed (default: fresh, recorded in the manifest)");
  cmd->add_option("--out", f.out_dir, "Output directory");
  cmd->add_option("--name", f.name, "Output file prefix");
}

InitialState parse_input(const std::string& text, int dim) {
  InitialState init;
  if (text.empty()) return init;
  std::vector<int> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--input: '" + item + "' is not an integer");
    }
  }
  if (static_cast<int>(values.size()) != 2 * dim) {
    throw ConfigError("--input needs " + std::to_string(2 * dim) + " comma-separated values");
  }
  init.x0 = {values[0], dim == 2 ? values[1] : 0};
  init.c0[0] = coin_from_int(values[static_cast<std::size_t>(dim)]);
  if (dim == 2) init.c0[1] = coin_from_int(values[3]);
  return init;
}

ExperimentConfig config_from_flags(const WalkFlags& f) {
  ExperimentConfig c;
  c.dim = f.dim;
  c.t_max = f.t_max;
  c.steps = f.steps.value_or(f.t_max);
  c.init = parse_input(f.input, f.dim);
  c.p = f.p;
  c.p_d = f.p_d;
  c.t_b = f.t_b;
  c.trials = f.trials;
  c.lattice_mode = lattice_mode_from_string(f.lattice_mode);
  return c;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// Plan from --config if given, else a one-run plan from the flags. The seed
// comes from --seed, then the file, then a fresh random value.
struct ResolvedPlan {
  ExperimentPlan plan;
  bool seed_generated = false;
};

ResolvedPlan resolve_plan(const WalkFlags& f, const std::string& command) {
  ResolvedPlan r;
  bool have_seed = false;
  if (!f.config_file.empty()) {
    const json j = read_json_file(f.config_file);
    r.plan = plan_from_json(j);
    have_seed = j.contains("seed");
  } else {
    r.plan.runs.push_back(config_from_flags(f));
    r.plan.labels.emplace_back("run0");
  }
  r.plan.command = command;
  if (!f.name.empty()) {
    r.plan.name = f.name;
  } else if (f.config_file.empty()) {
    r.plan.name = command;
  }
  if (f.seed) {
    r.plan.seed = *f.seed;
  } else if (!have_seed) {
    std::random_device rd;
    r.plan.seed = (std::uint64_t{rd()} << 32) ^ rd();
    r.seed_generated = true;
  }
  return r;
}

class OutputDir {
 public:
  explicit OutputDir(const std::string& flag) {
    if (!flag.empty()) {
      dir_ = flag;
    } else if (const char* env = std::getenv("QWALK_OUTPUT_DIR"); env != nullptr && *env != '\0') {
      dir_ = env;
    } else {
      dir_ = ".";
    }
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  template <class Writer>
  void write(const std::string& file, Writer&& writer) {
    const fs::path path = dir_ / file;
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    writer(os);
    os.flush();
    if (!os) throw IoError("failed writing " + path.string());
    files_.push_back(path.string());
  }

  void write_json(const std::string& file, const json& j) {
    write(file, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  }

  const std::vector<std::string>& files() const noexcept { return files_; }
  std::string path(const std::string& file) const { return (dir_ / file).string(); }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

void finish(OutputDir& out, const ResolvedPlan& r, const std::string& config_file) {
  RunManifest m;
  m.command = r.plan.command;
  m.seed = r.plan.seed;
  m.seed_generated = r.seed_generated;
  m.created_utc = utc_timestamp();
  m.config_file = config_file;
  m.config = plan_to_json(r.plan);
  m.outputs = out.files();
  out.write_json(r.plan.name + "_manifest.json", manifest_to_json(m));
  std::cout << "wrote " << out.files().size() << " files; manifest "
            << out.path(r.plan.name + "_manifest.json") << " (seed " << r.plan.seed << ")\n";
}

int cmd_evolve(const WalkFlags& f) {
  ResolvedPlan r = resolve_plan(f, "evolve");
  if (r.plan.runs.size() != 1) throw ConfigError("evolve takes exactly one configuration");
  ExperimentConfig c = r.plan.runs.front();
  c.trials = 1;
  c.master_seed = r.plan.seed;
  c.validate();
  r.plan.runs.front() = c;

  // Same streams as trial 0 of an ensemble with this master seed.
  const CoinLattice lattice = trial_lattice(c, 0);
  RandomStream masks(derive_seed(c.master_seed, stream::kMask, 0));
  const auto states = evolve(c.init, lattice, DephasingSpec(c.p_d), c.steps, masks);
  std::vector<Distribution> snapshots;
  snapshots.push_back(Distribution::point_mass(lattice.geometry(), c.init.x0));
  for (const auto& s : states) snapshots.push_back(distribution(s));
  std::optional<Boundary> boundary;
  if (c.t_b) boundary = Boundary{*c.t_b};
  MetricSeries series = metric_series(snapshots, boundary);
  series.p = c.p;
  series.p_d = c.p_d;

  OutputDir out(f.out_dir);
  const std::string& n = r.plan.name;
  out.write(n + "_dist.csv", [&](std::ostream& os) { write_distributions_csv(os, snapshots); });
  out.write(n + "_metrics.csv", [&](std::ostream& os) { write_metrics_csv(os, series); });
  out.write_json(n + "_lattice.json", lattice_to_json(lattice));
  out.write_json(n + "_config.json", plan_to_json(r.plan));
  finish(out, r, out.path(n + "_config.json"));
  return kExitOk;
}

int run_plan(ResolvedPlan& r, const WalkFlags& f) {
  RunOptions opts;
  opts.threads = f.threads;
  const auto results = sweep(r.plan.runs, r.plan.seed, opts);
  OutputDir out(f.out_dir);
  const std::string& n = r.plan.name;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const std::string stem = n + "_" + r.plan.labels[i];
    const EnsembleResult& res = results[i];
    out.write(stem + "_dist.csv",
              [&](std::ostream& os) { write_distributions_csv(os, res.distributions); });
    out.write(stem + "_metrics.csv", [&](std::ostream& os) { write_metrics_csv(os, res.metrics); });
    out.write_json(stem + "_result.json", result_to_json(res));
    std::cout << r.plan.labels[i] << ": final variance " << res.metrics.variance.back();
    if (res.config.t_b) std::cout << ", final P_esc " << res.metrics.p_esc.back();
    std::cout << " (" << res.config.trials << " trials)\n";
  }
  out.write_json(n + "_config.json", plan_to_json(r.plan));
  finish(out, r, out.path(n + "_config.json"));
  return kExitOk;
}

int cmd_experiment(const WalkFlags& f) {
  ResolvedPlan r = resolve_plan(f, "experiment");
  return run_plan(r, f);
}

int cmd_preset(const WalkFlags& f, const std::string& name, int trials) {
  ResolvedPlan r;
  if (f.seed) {
    r.plan.seed = *f.seed;
  } else {
    std::random_device rd;
    r.plan.seed = (std::uint64_t{rd()} << 32) ^ rd();
    r.seed_generated = true;
  }
  const std::uint64_t seed = r.plan.seed;
  r.plan = make_preset(name, trials, seed);
  r.plan.command = "experiment";
  if (!f.name.empty()) r.plan.name = f.name;
  return run_plan(r, f);
}

int cmd_oracle(const WalkFlags& f, std::size_t max_basis) {
  ResolvedPlan r = resolve_plan(f, "oracle");
  if (r.plan.runs.size() != 1) throw ConfigError("oracle takes exactly one configuration");
  ExperimentConfig c = r.plan.runs.front();
  c.trials = 1;
  c.master_seed = r.plan.seed;
  c.validate();
  r.plan.runs.front() = c;

  const Geometry g = c.geometry();
  if (g.basis_size() > max_basis) {
    throw CapacityError("basis size " + std::to_string(g.basis_size()) +
                        " exceeds the oracle cap of " + std::to_string(max_basis) +
                        " (raise with --max-basis)");
  }
  const CoinLattice lattice = trial_lattice(c, 0);
  const auto rhos = oracle::evolve_density(c, lattice, {max_basis});
  const Eigen::SparseMatrix<double> u = oracle::step_unitary(lattice);
  const double factor = (1.0 - 2.0 * c.p_d) * (1.0 - 2.0 * c.p_d);
  constexpr double kTol = 1e-9;

  json steps = json::array();
  bool law_ok = true;
  bool pure = true;
  std::vector<Distribution> diag;
  diag.push_back(oracle::diagonal_distribution(rhos[0], g, 0));
  for (std::size_t t = 1; t < rhos.size(); ++t) {
    const Eigen::MatrixXd noiseless = u * rhos[t - 1].matrix() * u.transpose();
    const Eigen::MatrixXd& rho = rhos[t].matrix();
    double off_err = 0.0;
    double ratio_err = 0.0;
    double diag_err = 0.0;
    std::size_t compared = 0;
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
      diag_err = std::max(diag_err, std::abs(rho(i, i) - noiseless(i, i)));
      for (Eigen::Index j = 0; j < rho.cols(); ++j) {
        if (i == j) continue;
        off_err = std::max(off_err, std::abs(rho(i, j) - factor * noiseless(i, j)));
        if (std::abs(noiseless(i, j)) > 1e-12) {
          ratio_err = std::max(ratio_err, std::abs(rho(i, j) / noiseless(i, j) - factor));
          ++compared;
        }
      }
    }
    const double purity = rhos[t].purity();
    law_ok = law_ok && off_err <= kTol && ratio_err <= kTol && diag_err <= kTol;
    pure = pure && std::abs(purity - 1.0) <= kTol;
    steps.push_back({{"t", t},
                     {"trace", rhos[t].trace()},
                     {"purity", purity},
                     {"max_offdiag_error", off_err},
                     {"max_ratio_error", ratio_err},
                     {"max_diag_error", diag_err},
                     {"offdiag_entries_compared", compared}});
    diag.push_back(oracle::diagonal_distribution(rhos[t], g, static_cast<int>(t)));
  }
  json report = {{"basis_size", g.basis_size()},
                 {"p", c.p},
                 {"p_d", c.p_d},
                 {"offdiag_factor", factor},
                 {"tolerance", kTol},
                 {"channel_law_ok", law_ok},
                 {"purity_preserved", pure},
                 {"steps", steps}};
  if (g.basis_size() <= 12 && rhos.size() > 1) {
    const Eigen::MatrixXd before = u * rhos[rhos.size() - 2].matrix() * u.transpose();
    const Eigen::MatrixXd mix = oracle::dephase_mixture_exhaustive(before, c.p_d, 12);
    report["exhaustive_mixture_max_error"] = (mix - rhos.back().matrix()).cwiseAbs().maxCoeff();
  }

  OutputDir out(f.out_dir);
  const std::string& n = r.plan.name;
  out.write(n + "_diag.csv", [&](std::ostream& os) { write_distributions_csv(os, diag); });
  out.write_json(n + "_report.json", report);
  out.write_json(n + "_config.json", plan_to_json(r.plan));
  std::cout << "off-diagonal factor " << factor << " per step: "
            << (law_ok ? "confirmed" : "VIOLATED") << " within " << kTol
            << "; purity " << (pure ? "preserved" : "not preserved") << '\n';
  finish(out, r, out.path(n + "_config.json"));
  return law_ok ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coined quantum and classical random walks on congested lattices"};
  app.require_subcommand(1);

  WalkFlags evolve_flags;
  auto* evolve_cmd = app.add_subcommand("evolve", "Run one trajectory and write per-step data");
  add_walk_flags(evolve_cmd, evolve_flags);

  WalkFlags exp_flags;
  exp_flags.dim = 2;
  auto* exp_cmd = app.add_subcommand("experiment", "Run Monte Carlo ensembles");
  add_walk_flags(exp_cmd, exp_flags);
  exp_cmd->add_option("--trials", exp_flags.trials, "Trials per configuration");
  exp_cmd->add_option("--lattice-mode", exp_flags.lattice_mode,
                      "resample_per_trial or fixed_per_batch");
  exp_cmd->add_option("--threads", exp_flags.threads, "Worker threads");

  WalkFlags preset_flags;
  std::string preset_name;
  int preset_trials = 1000;
  auto* preset_cmd = app.add_subcommand("preset", "Run a figure preset (fig1..fig5)");
  preset_cmd->add_option("preset", preset_name, "Preset name")->required()
      ->check(CLI::IsMember(preset_names()));
  preset_cmd->add_option("--trials", preset_trials, "Trials per stochastic configuration");
  preset_cmd->add_option("--seed", preset_flags.seed, "Master seed");
  preset_cmd->add_option("--out", preset_flags.out_dir, "Output directory");
  preset_cmd->add_option("--name", preset_flags.name, "Output file prefix");
  preset_cmd->add_option("--threads", preset_flags.threads, "Worker threads");

  WalkFlags oracle_flags;
  oracle_flags.t_max = 3;
  std::size_t max_basis = 64;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exact density-matrix evolution and report");
  add_walk_flags(oracle_cmd, oracle_flags);
  oracle_cmd->add_option("--max-basis", max_basis, "Largest basis dimension for the oracle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*evolve_cmd) return cmd_evolve(evolve_flags);
    if (*exp_cmd) return cmd_experiment(exp_flags);
    if (*preset_cmd) return cmd_preset(preset_flags, preset_name, preset_trials);
    if (*oracle_cmd) return cmd_oracle(oracle_flags, max_basis);
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return kExitCapacity;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
