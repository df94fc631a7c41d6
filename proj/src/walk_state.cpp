#include "qwalk/walk_state.hpp"

#include <numeric>

namespace qwalk {

WalkState::WalkState(Geometry geometry)
    : geometry_(std::move(geometry)), amplitudes_(geometry_.basis_size(), 0.0) {}

WalkState WalkState::localized(Geometry geometry, const InitialState& init) {
  WalkState state(std::move(geometry));
  state.set_amplitude(init.x0, init.c0, 1.0);
  return state;
}

double WalkState::amplitude(Position pos, CoinTuple coins) const {
  return amplitudes_[geometry_.basis_index(pos, coins)];
}

void WalkState::set_amplitude(Position pos, CoinTuple coins, double value) {
  amplitudes_[geometry_.basis_index(pos, coins)] = value;
}

double WalkState::norm_squared() const noexcept {
  return std::transform_reduce(amplitudes_.begin(), amplitudes_.end(), 0.0, std::plus<>{},
                               [](double a) { return a * a; });
}

}  // namespace qwalk
