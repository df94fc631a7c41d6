#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qwalk/metrics.hpp"
#include "qwalk/montecarlo.hpp"

namespace qwalk {

/// Shortest round-trip decimal form; "nan" for NaN.
std::string format_double(double v);

/// Header `t,x,P` (1D) or `t,x,y,P` (2D), one row per site per snapshot.
void write_distributions_csv(std::ostream& os, std::span<const Distribution> snapshots);

/// Header `t,variance,p_esc,stderr_var,stderr_pesc`, one row per time step.
void write_metrics_csv(std::ostream& os, const MetricSeries& series);

nlohmann::json config_to_json(const ExperimentConfig& config);
/// Missing keys take ExperimentConfig defaults; "steps" defaults to "t_max".
/// Throws ConfigError on malformed input.
ExperimentConfig config_from_json(const nlohmann::json& j);

nlohmann::json metrics_to_json(const MetricSeries& series);
nlohmann::json distribution_to_json(const Distribution& dist);
/// Config echo, metric series and the final averaged distribution.
nlohmann::json result_to_json(const EnsembleResult& result);

/// A named, seeded list of configurations run as one sweep. This is the
/// config-file format accepted by the CLI and re-emitted next to every run.
struct ExperimentPlan {
  std::string name = "experiment";
  std::string command = "experiment";
  std::uint64_t seed = 0;
  std::vector<std::string> labels;
  std::vector<ExperimentConfig> runs;
};

nlohmann::json plan_to_json(const ExperimentPlan& plan);
ExperimentPlan plan_from_json(const nlohmann::json& j);

/// Bookkeeping written next to every set of output files.
struct RunManifest {
  std::string command;
  std::uint64_t seed = 0;
  bool seed_generated = false;
  std::string created_utc;
  std::string config_file;
  nlohmann::json config;
  std::vector<std::string> outputs;
};

nlohmann::json manifest_to_json(const RunManifest& manifest);

/// Current UTC time as ISO 8601.
std::string utc_timestamp();

}  // namespace qwalk
