#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qwalk/rng.hpp"
#include "qwalk/walk_state.hpp"

namespace qwalk {

/// Per-step, per-basis-element probability of a sign (pi phase) flip.
class DephasingSpec {
 public:
  DephasingSpec() = default;
  /// Throws ConfigError unless 0 <= p_d <= 1.
  explicit DephasingSpec(double p_d);

  double p_d() const noexcept { return p_d_; }

 private:
  double p_d_ = 0.0;
};

/// One sampled diagonal +-1 matrix: flips[i] set means entry i is -1.
class FlipMask {
 public:
  explicit FlipMask(std::vector<std::uint8_t> flips);

  std::size_t size() const noexcept { return flips_.size(); }
  std::size_t flipped_count() const noexcept { return flipped_; }
  bool flipped(std::size_t i) const noexcept { return flips_[i] != 0; }
  std::span<const std::uint8_t> flags() const noexcept { return flips_; }

 private:
  std::vector<std::uint8_t> flips_;
  std::size_t flipped_ = 0;
};

/// Each of the m entries flips independently with probability p_d, one draw per
/// entry in basis order.
FlipMask sample_mask(std::size_t m, double p_d, RandomStream& rng);

/// Negates the amplitudes selected by the mask. Throws ConfigError on size mismatch.
WalkState apply_mask(const WalkState& state, const FlipMask& mask);

/// Samples and applies a mask in one pass. Consumes the same draws as
/// sample_mask followed by apply_mask, except that p_d = 0 and p_d = 1 consume
/// none (their masks are deterministic).
void apply_random_flips(std::span<double> amplitudes, const DephasingSpec& deph,
                        RandomStream& rng);

/// Projective-measurement probability with the same off-diagonal damping:
/// p_m = 4 (1 - p_d) p_d.
double measurement_equivalent_rate(double p_d);

}  // namespace qwalk
