#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qwalk/io.hpp"

namespace qwalk {

/// Names accepted by make_preset.
std::vector<std::string> preset_names();

/// Experiment plans for the figure reproductions:
///
///   fig1  2D, t_max 20, p = 1: variance from |0,0,1,1> and escape (t_b 4) from
///         |-20,0,1,1>, each quantum (p_d 0) and classical (p_d 1/2).
///   fig2  2D, t_max 15, t_b 4, start |-15,0,1,1>, p in {1, .9, .8, .7} quantum
///         plus a classical p = .7 baseline.
///   fig3  2D, t_max 10, |0,0,1,1>, p = 1, p_d in {0, 0.00015, 0.0005}.
///   fig4  2D, t_max 10, |0,0,1,1>, grid over p and p_d (final variance).
///   fig5  2D, t_max 10, t_b 2, start |-10,0,1,1>, grid over p and p_d (escape).
///
/// Deterministic members (p = 1, p_d in {0, 1}) run a single trial; the rest
/// use `trials`. Throws ConfigError for unknown names.
ExperimentPlan make_preset(std::string_view name, int trials, std::uint64_t seed);

/// Grid axes shared by fig4 and fig5.
std::vector<double> preset_open_probabilities();
std::vector<double> preset_dephasing_probabilities();

}  // namespace qwalk
