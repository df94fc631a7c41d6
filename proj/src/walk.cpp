#include "qwalk/walk.hpp"

#include <algorithm>
#include <array>

#include "qwalk/error.hpp"

namespace qwalk {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Local coin action on one site's coin subvector. Slot layout per Geometry.
inline void coin_local(int dim, CoinKind kind, const double* in, double* out) {
  if (dim == 1) {
    if (kind == CoinKind::Hadamard) {
      out[0] = (in[0] + in[1]) * kInvSqrt2;
      out[1] = (in[0] - in[1]) * kInvSqrt2;
    } else {
      out[0] = in[1];
      out[1] = in[0];
    }
    return;
  }
  if (kind == CoinKind::Hadamard) {
    // H on the y bit, then H on the x bit.
    const double a0 = (in[0] + in[1]) * kInvSqrt2;
    const double a1 = (in[0] - in[1]) * kInvSqrt2;
    const double a2 = (in[2] + in[3]) * kInvSqrt2;
    const double a3 = (in[2] - in[3]) * kInvSqrt2;
    out[0] = (a0 + a2) * kInvSqrt2;
    out[1] = (a1 + a3) * kInvSqrt2;
    out[2] = (a0 - a2) * kInvSqrt2;
    out[3] = (a1 - a3) * kInvSqrt2;
  } else {
    for (int s = 0; s < 4; ++s) out[s] = in[3 - s];
  }
}

void check_same_geometry(const Geometry& a, const Geometry& b) {
  if (!(a == b)) throw ConfigError("lattice geometry does not match the walk state");
}

// Per-slot displacement, one entry per coin slot.
std::array<Position, 4> slot_moves(const Geometry& g) {
  std::array<Position, 4> moves{};
  for (int s = 0; s < g.coins_per_site(); ++s) {
    const CoinTuple c = g.slot_coins(s);
    moves[static_cast<std::size_t>(s)] = {to_int(c[0]), g.dim() == 2 ? to_int(c[1]) : 0};
  }
  return moves;
}

// out[(site + move(slot)), slot] = in[site, slot]; optionally coins first.
template <bool kWithCoin>
void shift_kernel(const Geometry& g, const CoinLattice* lattice, std::span<const double> in,
                  std::span<double> out) {
  const int dim = g.dim();
  const int cps = g.coins_per_site();
  const AxisRange& ax = g.axis(0);
  const AxisRange& ay = g.axis(1);
  const int wy = ay.width();
  const auto moves = slot_moves(g);

  std::fill(out.begin(), out.end(), 0.0);
  std::array<double, 4> local{};
  std::size_t site = 0;
  for (int x = ax.lo; x <= ax.hi; ++x) {
    for (int y = ay.lo; y <= ay.hi; ++y, ++site) {
      const double* src = in.data() + site * static_cast<std::size_t>(cps);
      bool any = false;
      for (int s = 0; s < cps; ++s) any = any || src[s] != 0.0;
      if (!any) continue;
      if constexpr (kWithCoin) {
        coin_local(dim, lattice->kind(site), src, local.data());
        src = local.data();
      }
      for (int s = 0; s < cps; ++s) {
        const Position& mv = moves[static_cast<std::size_t>(s)];
        const int tx = x + mv.x;
        const int ty = y + mv.y;
        if (!ax.contains(tx) || !ay.contains(ty)) {
          if (src[s] != 0.0) {
            throw ConfigError("amplitude at " + to_string({x, y}, dim) +
                              " would step off the allocated lattice");
          }
          continue;
        }
        const auto target = static_cast<std::size_t>(tx - ax.lo) * static_cast<std::size_t>(wy) +
                            static_cast<std::size_t>(ty - ay.lo);
        out[target * static_cast<std::size_t>(cps) + static_cast<std::size_t>(s)] = src[s];
      }
    }
  }
}

}  // namespace

WalkState apply_coin(const WalkState& state, const CoinLattice& lattice) {
  const Geometry& g = state.geometry();
  check_same_geometry(g, lattice.geometry());
  WalkState out(g);
  out.set_time(state.time());
  const auto cps = static_cast<std::size_t>(g.coins_per_site());
  auto in = state.amplitudes();
  auto dst = out.amplitudes();
  for (std::size_t site = 0; site < g.num_sites(); ++site) {
    coin_local(g.dim(), lattice.kind(site), in.data() + site * cps, dst.data() + site * cps);
  }
  return out;
}

WalkState apply_step(const WalkState& state) {
  WalkState out(state.geometry());
  out.set_time(state.time());
  shift_kernel<false>(state.geometry(), nullptr, state.amplitudes(), out.amplitudes());
  return out;
}

WalkState evolve_step(const WalkState& state, const CoinLattice& lattice,
                      const DephasingSpec& deph, RandomStream& rng) {
  WalkState out = state;
  Propagator(lattice).advance(out, deph, rng);
  return out;
}

std::vector<WalkState> evolve(const InitialState& init, const CoinLattice& lattice,
                              const DephasingSpec& deph, int steps, RandomStream& rng) {
  const Geometry& g = lattice.geometry();
  if (steps < 0) throw ConfigError("steps must be nonnegative");
  const std::array<int, 2> c{init.x0.x, init.x0.y};
  for (int a = 0; a < g.dim(); ++a) {
    const AxisRange& r = g.axis(a);
    if (!r.contains(c[a] - steps) || !r.contains(c[a] + steps)) {
      throw ConfigError(std::to_string(steps) + " steps from " + to_string(init.x0, g.dim()) +
                        " need sites beyond the allocated lattice");
    }
  }
  std::vector<WalkState> trajectory;
  trajectory.reserve(static_cast<std::size_t>(steps));
  WalkState state = WalkState::localized(g, init);
  Propagator prop(lattice);
  for (int t = 0; t < steps; ++t) {
    prop.advance(state, deph, rng);
    trajectory.push_back(state);
  }
  return trajectory;
}

Propagator::Propagator(const CoinLattice& lattice)
    : lattice_(&lattice), scratch_(lattice.geometry().basis_size(), 0.0) {}

void Propagator::coin_and_shift(std::span<const double> in, std::span<double> out) const {
  shift_kernel<true>(lattice_->geometry(), lattice_, in, out);
}

void Propagator::advance(WalkState& state, const DephasingSpec& deph, RandomStream& rng) {
  check_same_geometry(state.geometry(), lattice_->geometry());
  coin_and_shift(state.amplitudes(), scratch_);
  auto amps = state.amplitudes();
  std::copy(scratch_.begin(), scratch_.end(), amps.begin());
  apply_random_flips(amps, deph, rng);
  state.set_time(state.time() + 1);
}

}  // namespace qwalk
