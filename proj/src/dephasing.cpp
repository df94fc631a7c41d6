#include "qwalk/dephasing.hpp"

#include <algorithm>

#include "qwalk/error.hpp"

namespace qwalk {

namespace {

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError(std::string(what) + " must lie in [0, 1], got " + std::to_string(p));
  }
}

}  // namespace

DephasingSpec::DephasingSpec(double p_d) : p_d_(p_d) { check_probability(p_d, "p_d"); }

FlipMask::FlipMask(std::vector<std::uint8_t> flips) : flips_(std::move(flips)) {
  flipped_ = static_cast<std::size_t>(
      std::count_if(flips_.begin(), flips_.end(), [](std::uint8_t f) { return f != 0; }));
}

FlipMask sample_mask(std::size_t m, double p_d, RandomStream& rng) {
  if (m == 0) throw PreconditionError("mask size must be at least 1");
  const BernoulliThreshold flip(p_d);
  std::vector<std::uint8_t> flags(m);
  for (auto& f : flags) f = flip(rng) ? 1 : 0;
  return FlipMask(std::move(flags));
}

WalkState apply_mask(const WalkState& state, const FlipMask& mask) {
  if (mask.size() != state.geometry().basis_size()) {
    throw ConfigError("mask size " + std::to_string(mask.size()) + " does not match basis size " +
                      std::to_string(state.geometry().basis_size()));
  }
  WalkState out = state;
  auto amps = out.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (mask.flipped(i)) amps[i] = -amps[i];
  }
  return out;
}

void apply_random_flips(std::span<double> amplitudes, const DephasingSpec& deph,
                        RandomStream& rng) {
  const double p_d = deph.p_d();
  if (p_d == 0.0) return;
  if (p_d == 1.0) {
    for (double& a : amplitudes) a = -a;
    return;
  }
  const BernoulliThreshold flip(p_d);
  for (double& a : amplitudes) {
    if (flip(rng)) a = -a;
  }
}

double measurement_equivalent_rate(double p_d) {
  check_probability(p_d, "p_d");
  return 4.0 * (1.0 - p_d) * p_d;
}

}  // namespace qwalk
