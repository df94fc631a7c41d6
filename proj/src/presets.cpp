#include "qwalk/presets.hpp"

#include <cstdio>

#include "qwalk/error.hpp"

namespace qwalk {

namespace {

ExperimentConfig walk_2d(int t_max, Position start, double p, double p_d, std::optional<int> t_b,
                         int trials) {
  ExperimentConfig c;
  c.dim = 2;
  c.t_max = t_max;
  c.steps = t_max;
  c.init = {start, {CoinValue::Plus, CoinValue::Plus}};
  c.p = p;
  c.p_d = p_d;
  c.t_b = t_b;
  const bool deterministic = p == 1.0 && (p_d == 0.0 || p_d == 1.0);
  c.trials = deterministic ? 1 : trials;
  return c;
}

std::string label(const char* prefix, double p, double p_d) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_p%.2f_pd%g", prefix, p, p_d);
  return buf;
}

}  // namespace

std::vector<std::string> preset_names() { return {"fig1", "fig2", "fig3", "fig4", "fig5"}; }

std::vector<double> preset_open_probabilities() {
  return {1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1};
}

std::vector<double> preset_dephasing_probabilities() {
  return {0.0, 0.00015, 0.0005, 0.005, 0.05, 0.5};
}

ExperimentPlan make_preset(std::string_view name, int trials, std::uint64_t seed) {
  if (trials < 1) throw ConfigError("trials must be positive");
  ExperimentPlan plan;
  plan.name = std::string(name);
  plan.seed = seed;
  auto add = [&](std::string l, ExperimentConfig c) {
    plan.labels.push_back(std::move(l));
    plan.runs.push_back(c);
  };
  if (name == "fig1") {
    const int t = 20;
    add("variance_quantum", walk_2d(t, {0, 0}, 1.0, 0.0, std::nullopt, trials));
    add("variance_classical", walk_2d(t, {0, 0}, 1.0, 0.5, std::nullopt, trials));
    add("escape_quantum", walk_2d(t, {-t, 0}, 1.0, 0.0, 4, trials));
    add("escape_classical", walk_2d(t, {-t, 0}, 1.0, 0.5, 4, trials));
  } else if (name == "fig2") {
    const int t = 15;
    for (double p : {1.0, 0.9, 0.8, 0.7}) add(label("quantum", p, 0.0), walk_2d(t, {-t, 0}, p, 0.0, 4, trials));
    add(label("classical", 0.7, 0.5), walk_2d(t, {-t, 0}, 0.7, 0.5, 4, trials));
  } else if (name == "fig3") {
    for (double pd : {0.0, 0.00015, 0.0005}) {
      add(label("dist", 1.0, pd), walk_2d(10, {0, 0}, 1.0, pd, std::nullopt, trials));
    }
  } else if (name == "fig4") {
    for (double p : preset_open_probabilities()) {
      for (double pd : preset_dephasing_probabilities()) {
        add(label("variance", p, pd), walk_2d(10, {0, 0}, p, pd, std::nullopt, trials));
      }
    }
  } else if (name == "fig5") {
    for (double p : preset_open_probabilities()) {
      for (double pd : preset_dephasing_probabilities()) {
        add(label("escape", p, pd), walk_2d(10, {-10, 0}, p, pd, 2, trials));
      }
    }
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "' (expected fig1..fig5)");
  }
  return plan;
}

}  // namespace qwalk
