#include "qwalk/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <ostream>

#include "qwalk/error.hpp"
#include "qwalk/rng.hpp"
#include "qwalk/version.hpp"

namespace qwalk {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_distributions_csv(std::ostream& os, std::span<const Distribution> snapshots) {
  if (snapshots.empty()) return;
  const bool two_d = snapshots.front().geometry().dim() == 2;
  os << (two_d ? "t,x,y,P\n" : "t,x,P\n");
  for (const Distribution& d : snapshots) {
    const Geometry& g = d.geometry();
    const auto probs = d.probs();
    for (std::size_t site = 0; site < probs.size(); ++site) {
      const Position pos = g.site_position(site);
      os << d.time() << ',' << pos.x << ',';
      if (two_d) os << pos.y << ',';
      os << format_double(probs[site]) << '\n';
    }
  }
}

void write_metrics_csv(std::ostream& os, const MetricSeries& s) {
  os << "t,variance,p_esc,stderr_var,stderr_pesc\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    os << s.time[i] << ',' << format_double(s.variance[i]) << ',' << format_double(s.p_esc[i])
       << ',' << format_double(s.stderr_variance[i]) << ',' << format_double(s.stderr_p_esc[i])
       << '\n';
  }
}

json config_to_json(const ExperimentConfig& c) {
  json x0 = json::array({c.init.x0.x});
  json c0 = json::array({to_int(c.init.c0[0])});
  if (c.dim == 2) {
    x0.push_back(c.init.x0.y);
    c0.push_back(to_int(c.init.c0[1]));
  }
  json j = {{"dim", c.dim},
            {"t_max", c.t_max},
            {"steps", c.steps},
            {"x0", x0},
            {"c0", c0},
            {"p", c.p},
            {"p_d", c.p_d},
            {"trials", c.trials},
            {"lattice_mode", to_string(c.lattice_mode)},
            {"master_seed", c.master_seed}};
  j["t_b"] = c.t_b ? json(*c.t_b) : json(nullptr);
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  try {
    ExperimentConfig c;
    c.dim = j.value("dim", c.dim);
    c.t_max = j.value("t_max", c.t_max);
    c.steps = j.value("steps", c.t_max);
    if (j.contains("x0")) {
      const auto& x0 = j.at("x0");
      if (static_cast<int>(x0.size()) != c.dim) throw ConfigError("x0 must have dim entries");
      c.init.x0 = {x0[0].get<int>(), c.dim == 2 ? x0[1].get<int>() : 0};
    }
    if (j.contains("c0")) {
      const auto& c0 = j.at("c0");
      if (static_cast<int>(c0.size()) != c.dim) throw ConfigError("c0 must have dim entries");
      c.init.c0[0] = coin_from_int(c0[0].get<int>());
      if (c.dim == 2) c.init.c0[1] = coin_from_int(c0[1].get<int>());
    }
    c.p = j.value("p", c.p);
    c.p_d = j.value("p_d", c.p_d);
    if (j.contains("t_b") && !j.at("t_b").is_null()) c.t_b = j.at("t_b").get<int>();
    c.trials = j.value("trials", c.trials);
    if (j.contains("lattice_mode")) {
      c.lattice_mode = lattice_mode_from_string(j.at("lattice_mode").get<std::string>());
    }
    c.master_seed = j.value("master_seed", c.master_seed);
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
}

json metrics_to_json(const MetricSeries& s) {
  // NaN has no JSON form; absent escape data is written as null.
  auto nullable = [](const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(std::isnan(x) ? json(nullptr) : json(x));
    return a;
  };
  json j = {{"time", s.time},
            {"variance", s.variance},
            {"p_esc", nullable(s.p_esc)},
            {"stderr_variance", s.stderr_variance},
            {"stderr_p_esc", nullable(s.stderr_p_esc)},
            {"p", s.p},
            {"p_d", s.p_d},
            {"t_max", s.t_max},
            {"trials", s.trials}};
  j["t_b"] = s.t_b ? json(*s.t_b) : json(nullptr);
  return j;
}

json distribution_to_json(const Distribution& d) {
  const Geometry& g = d.geometry();
  json extent = json::array();
  for (int a = 0; a < g.dim(); ++a) extent.push_back({g.axis(a).lo, g.axis(a).hi});
  return {{"dim", g.dim()}, {"time", d.time()}, {"extent", extent},
          {"probs", std::vector<double>(d.probs().begin(), d.probs().end())}};
}

json result_to_json(const EnsembleResult& r) {
  return {{"config", config_to_json(r.config)},
          {"metrics", metrics_to_json(r.metrics)},
          {"final_distribution", distribution_to_json(r.distributions.back())}};
}

json plan_to_json(const ExperimentPlan& plan) {
  json runs = json::array();
  for (std::size_t i = 0; i < plan.runs.size(); ++i) {
    json r = config_to_json(plan.runs[i]);
    r.erase("master_seed");  // derived from the plan seed
    r["label"] = i < plan.labels.size() ? plan.labels[i] : "run" + std::to_string(i);
    runs.push_back(std::move(r));
  }
  return {{"name", plan.name}, {"command", plan.command}, {"seed", plan.seed}, {"runs", runs}};
}

ExperimentPlan plan_from_json(const json& j) {
  try {
    ExperimentPlan plan;
    if (j.contains("runs")) {
      plan.name = j.value("name", plan.name);
      plan.command = j.value("command", plan.command);
      plan.seed = j.value("seed", plan.seed);
      for (const auto& r : j.at("runs")) {
        plan.runs.push_back(config_from_json(r));
        plan.labels.push_back(r.value("label", "run" + std::to_string(plan.labels.size())));
      }
    } else {
      // A bare config object is a one-run plan.
      plan.runs.push_back(config_from_json(j));
      plan.labels.emplace_back("run0");
      plan.seed = j.value("seed", plan.seed);
    }
    if (plan.runs.empty()) throw ConfigError("experiment plan has no runs");
    return plan;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed experiment plan: ") + e.what());
  }
}

json manifest_to_json(const RunManifest& m) {
  return {{"software", "qwalk"},
          {"version", std::string(kVersion)},
          {"rng", std::string(kRngAlgorithm)},
          {"command", m.command},
          {"seed", m.seed},
          {"seed_generated", m.seed_generated},
          {"created_utc", m.created_utc},
          {"config_file", m.config_file},
          {"config", m.config},
          {"outputs", m.outputs}};
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace qwalk
