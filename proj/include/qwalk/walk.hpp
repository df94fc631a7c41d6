#pragma once

#include <span>
#include <vector>

#include "qwalk/dephasing.hpp"
#include "qwalk/lattice.hpp"
#include "qwalk/rng.hpp"
#include "qwalk/walk_state.hpp"

namespace qwalk {

/// Multiplies each site's coin subvector by H (H x H in 2D) on open sites and
/// X (X x X) on defects. Throws ConfigError if the geometries differ.
WalkState apply_coin(const WalkState& state, const CoinLattice& lattice);

/// Moves the amplitude at (x, c) to (x + c, c) on every axis. Throws ConfigError
/// if a nonzero amplitude would leave the allocated lattice. Time is unchanged.
WalkState apply_step(const WalkState& state);

/// One full step: coin, shift, then a freshly sampled sign-flip mask. Time + 1.
WalkState evolve_step(const WalkState& state, const CoinLattice& lattice,
                      const DephasingSpec& deph, RandomStream& rng);

/// States after t = 1..steps (element t-1 has time t). The initial state itself
/// is not part of the result. Throws ConfigError if the light cone of `steps`
/// steps from init.x0 does not fit the lattice.
std::vector<WalkState> evolve(const InitialState& init, const CoinLattice& lattice,
                              const DephasingSpec& deph, int steps, RandomStream& rng);

/// In-place stepper over a fixed lattice that reuses its scratch buffer.
/// advance() is numerically identical to evolve_step.
class Propagator {
 public:
  explicit Propagator(const CoinLattice& lattice);

  const CoinLattice& lattice() const noexcept { return *lattice_; }

  /// Coin and shift only, out = S C in. `out` must not alias `in`.
  void coin_and_shift(std::span<const double> in, std::span<double> out) const;

  void advance(WalkState& state, const DephasingSpec& deph, RandomStream& rng);

 private:
  const CoinLattice* lattice_;
  std::vector<double> scratch_;
};

}  // namespace qwalk
