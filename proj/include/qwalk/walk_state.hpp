#pragma once

#include <span>
#include <vector>

#include "qwalk/geometry.hpp"

namespace qwalk {

/// Starting site and coin of a walk: |x0, c0>.
struct InitialState {
  Position x0{};
  CoinTuple c0{CoinValue::Plus, CoinValue::Plus};
};

/// Pure walker state: one real amplitude per (site, coin) basis element.
///
/// Amplitudes are real because every operator in play (Hadamard, bit flip,
/// sign flips, shift) is a real orthogonal matrix.
class WalkState {
 public:
  explicit WalkState(Geometry geometry);

  /// |x0, c0> at time 0. Throws ConfigError if x0 is outside the geometry.
  static WalkState localized(Geometry geometry, const InitialState& init);

  const Geometry& geometry() const noexcept { return geometry_; }
  int time() const noexcept { return time_; }
  void set_time(int t) noexcept { time_ = t; }

  std::span<const double> amplitudes() const noexcept { return amplitudes_; }
  std::span<double> amplitudes() noexcept { return amplitudes_; }

  double amplitude(Position pos, CoinTuple coins) const;
  void set_amplitude(Position pos, CoinTuple coins, double value);

  /// Sum of squared amplitudes.
  double norm_squared() const noexcept;

 private:
  Geometry geometry_;
  std::vector<double> amplitudes_;
  int time_ = 0;
};

}  // namespace qwalk
