#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qwalk/dephasing.hpp"
#include "qwalk/error.hpp"
#include "qwalk/io.hpp"
#include "qwalk/lattice.hpp"
#include "qwalk/metrics.hpp"
#include "qwalk/montecarlo.hpp"
#include "qwalk/oracle.hpp"
#include "qwalk/presets.hpp"
#include "qwalk/version.hpp"
#include "qwalk/walk.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace qwalk;

namespace {

// Probabilities as an array shaped (nx,) or (nx, ny).
py::array_t<double> probs_array(const Distribution& d) {
  const Geometry& g = d.geometry();
  std::vector<py::ssize_t> shape{g.axis(0).width()};
  if (g.dim() == 2) shape.push_back(g.axis(1).width());
  py::array_t<double> a(shape);
  std::copy(d.probs().begin(), d.probs().end(), a.mutable_data());
  return a;
}

py::dict metrics_dict(const MetricSeries& s) {
  return py::dict("time"_a = s.time, "variance"_a = s.variance, "p_esc"_a = s.p_esc,
                  "stderr_variance"_a = s.stderr_variance, "stderr_p_esc"_a = s.stderr_p_esc);
}

std::vector<std::pair<int, int>> extent(const Geometry& g) {
  std::vector<std::pair<int, int>> e;
  for (int a = 0; a < g.dim(); ++a) e.emplace_back(g.axis(a).lo, g.axis(a).hi);
  return e;
}

InitialState make_init(const std::vector<int>& x0, const std::vector<int>& c0) {
  if (x0.size() != c0.size() || x0.empty() || x0.size() > 2) {
    throw ConfigError("x0 and c0 must both have dim entries");
  }
  InitialState init;
  init.x0 = {x0[0], x0.size() == 2 ? x0[1] : 0};
  init.c0[0] = coin_from_int(c0[0]);
  if (c0.size() == 2) init.c0[1] = coin_from_int(c0[1]);
  return init;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Coined quantum and classical walks on congested lattices";
  m.attr("__version__") = std::string(kVersion);
  m.attr("RNG_ALGORITHM") = std::string(kRngAlgorithm);

  static py::exception<Error> base_error(m, "QwalkError");
  py::register_exception<ConfigError>(m, "ConfigError", base_error.ptr());
  py::register_exception<CapacityError>(m, "CapacityError", base_error.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base_error.ptr());
  py::register_exception<PreconditionError>(m, "PreconditionError", base_error.ptr());

  py::enum_<LatticeMode>(m, "LatticeMode")
      .value("RESAMPLE_PER_TRIAL", LatticeMode::ResamplePerTrial)
      .value("FIXED_PER_BATCH", LatticeMode::FixedPerBatch);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init([](int dim, int t_max, std::optional<int> steps, std::vector<int> x0,
                       std::vector<int> c0, double p, double p_d, std::optional<int> t_b,
                       int trials, LatticeMode mode, std::uint64_t seed) {
             ExperimentConfig c;
             c.dim = dim;
             c.t_max = t_max;
             c.steps = steps.value_or(t_max);
             if (x0.empty()) x0.assign(static_cast<std::size_t>(dim), 0);
             if (c0.empty()) c0.assign(static_cast<std::size_t>(dim), 1);
             c.init = make_init(x0, c0);
             c.p = p;
             c.p_d = p_d;
             c.t_b = t_b;
             c.trials = trials;
             c.lattice_mode = mode;
             c.master_seed = seed;
             c.validate();
             return c;
           }),
           "dim"_a = 2, "t_max"_a = 10, "steps"_a = py::none(), "x0"_a = std::vector<int>{},
           "c0"_a = std::vector<int>{}, "p"_a = 1.0, "p_d"_a = 0.0, "t_b"_a = py::none(),
           "trials"_a = 1000, "lattice_mode"_a = LatticeMode::ResamplePerTrial, "seed"_a = 0)
      .def_readwrite("dim", &ExperimentConfig::dim)
      .def_readwrite("t_max", &ExperimentConfig::t_max)
      .def_readwrite("steps", &ExperimentConfig::steps)
      .def_readwrite("p", &ExperimentConfig::p)
      .def_readwrite("p_d", &ExperimentConfig::p_d)
      .def_readwrite("t_b", &ExperimentConfig::t_b)
      .def_readwrite("trials", &ExperimentConfig::trials)
      .def_readwrite("lattice_mode", &ExperimentConfig::lattice_mode)
      .def_readwrite("seed", &ExperimentConfig::master_seed)
      .def("validate", &ExperimentConfig::validate)
      .def("extent", [](const ExperimentConfig& c) { return extent(c.geometry()); })
      .def("to_json", [](const ExperimentConfig& c) { return config_to_json(c).dump(); })
      .def_static("from_json", [](const std::string& s) {
        return config_from_json(nlohmann::json::parse(s));
      });

  py::class_<EnsembleResult>(m, "EnsembleResult")
      .def_readonly("config", &EnsembleResult::config)
      .def_property_readonly("metrics", [](const EnsembleResult& r) { return metrics_dict(r.metrics); })
      .def("distribution", [](const EnsembleResult& r, int t) {
             if (t < 0 || t >= static_cast<int>(r.distributions.size())) {
               throw py::index_error("time out of range");
             }
             return probs_array(r.distributions[static_cast<std::size_t>(t)]);
           }, "t"_a)
      .def_property_readonly("extent", [](const EnsembleResult& r) {
        return extent(r.distributions.front().geometry());
      });

  m.def("run", [](const ExperimentConfig& c, unsigned threads) {
          py::gil_scoped_release release;
          return run(c, {threads});
        }, "config"_a, "threads"_a = 1, "Run a Monte Carlo ensemble.");

  m.def("sweep", [](const std::vector<ExperimentConfig>& cs, std::uint64_t seed, unsigned threads) {
          py::gil_scoped_release release;
          return sweep(cs, seed, {threads});
        }, "configs"_a, "seed"_a, "threads"_a = 1,
        "Run several configurations with per-index derived seeds.");

  m.def("evolve", [](const ExperimentConfig& c) {
          // Single trajectory on trial 0's lattice and mask stream.
          c.validate();
          const CoinLattice lattice = trial_lattice(c, 0);
          RandomStream masks(derive_seed(c.master_seed, stream::kMask, 0));
          const auto states = evolve(c.init, lattice, DephasingSpec(c.p_d), c.steps, masks);
          py::list out;
          out.append(probs_array(Distribution::point_mass(lattice.geometry(), c.init.x0)));
          for (const auto& s : states) out.append(probs_array(distribution(s)));
          return out;
        }, "config"_a, "Per-step distributions (t = 0..steps) of one trajectory.");

  m.def("lattice", [](const ExperimentConfig& c, std::uint64_t trial) {
          return lattice_to_json(trial_lattice(c, trial)).dump();
        }, "config"_a, "trial"_a = 0, "JSON of the lattice used by a trial.");

  m.def("classical_distributions", [](const ExperimentConfig& c, std::uint64_t trial) {
          const auto ds = oracle::classical_distributions(c, trial_lattice(c, trial));
          py::list out;
          for (const auto& d : ds) out.append(probs_array(d));
          return out;
        }, "config"_a, "trial"_a = 0, "Exact classical walk (t = 0..steps) on a trial's lattice.");

  m.def("density_evolution", [](const ExperimentConfig& c, std::size_t max_basis) {
          const auto rhos = oracle::evolve_density(c, trial_lattice(c, 0), {max_basis});
          std::vector<Eigen::MatrixXd> out;
          for (const auto& r : rhos) out.push_back(r.matrix());
          return out;
        }, "config"_a, "max_basis"_a = 64, "Exact density matrices (t = 0..steps).");

  m.def("dephase_channel", [](const Eigen::MatrixXd& rho, double p_d) {
          return oracle::dephase_channel(oracle::DensityMatrix(rho), p_d).matrix();
        }, "rho"_a, "p_d"_a);
  m.def("dephase_mixture_exhaustive", [](const Eigen::MatrixXd& rho, double p_d) {
          return oracle::dephase_mixture_exhaustive(rho, p_d);
        }, "rho"_a, "p_d"_a);
  m.def("measurement_equivalent_rate", &measurement_equivalent_rate, "p_d"_a);

  m.def("variance", [](py::array_t<double, py::array::c_style | py::array::forcecast> probs,
                       int t_max) {
          const int dim = static_cast<int>(probs.ndim());
          if (dim != 1 && dim != 2) throw ConfigError("expected a 1D or 2D array");
          // The array is taken to cover [-t_max, t_max]^dim.
          const Geometry g = Geometry::square(dim, t_max);
          if (static_cast<std::size_t>(probs.size()) != g.num_sites()) {
            throw ConfigError("array shape does not match t_max");
          }
          Distribution d(g, std::vector<double>(probs.data(), probs.data() + probs.size()), 0);
          return variance(d);
        }, "probs"_a, "t_max"_a);

  m.def("preset", [](const std::string& name, int trials, std::uint64_t seed) {
          const ExperimentPlan plan = make_preset(name, trials, seed);
          py::list runs;
          for (std::size_t i = 0; i < plan.runs.size(); ++i) {
            runs.append(py::make_tuple(plan.labels[i], plan.runs[i]));
          }
          return runs;
        }, "name"_a, "trials"_a = 1000, "seed"_a = 0,
        "(label, config) pairs of a figure preset; run them with sweep(configs, seed).");
}
