#include "qwalk/geometry.hpp"

#include "qwalk/error.hpp"

namespace qwalk {

CoinValue coin_from_int(int v) {
  if (v == 1) return CoinValue::Plus;
  if (v == -1) return CoinValue::Minus;
  throw ConfigError("coin value must be -1 or +1, got " + std::to_string(v));
}

std::string to_string(const Position& pos, int dim) {
  if (dim == 1) return "(" + std::to_string(pos.x) + ")";
  return "(" + std::to_string(pos.x) + "," + std::to_string(pos.y) + ")";
}

Geometry::Geometry(int dim, int t_max, AxisRange x_axis, AxisRange y_axis)
    : dim_(dim), t_max_(t_max), axes_{x_axis, y_axis} {
  if (dim != 1 && dim != 2) {
    throw ConfigError("dimension must be 1 or 2, got " + std::to_string(dim));
  }
  if (t_max < 0) throw ConfigError("t_max must be nonnegative");
  if (dim == 1) axes_[1] = {0, 0};
  for (int a = 0; a < dim; ++a) {
    if (axes_[a].width() <= 0) throw ConfigError("empty axis range");
  }
  num_sites_ = static_cast<std::size_t>(axes_[0].width()) *
               static_cast<std::size_t>(axes_[1].width());
}

Geometry Geometry::square(int dim, int t_max) {
  return Geometry(dim, t_max, {-t_max, t_max}, {-t_max, t_max});
}

Geometry Geometry::for_walk(int dim, int t_max, Position start, int steps) {
  if (steps < 0) throw ConfigError("steps must be nonnegative");
  Geometry g = square(dim, t_max);
  const std::array<int, 2> coords{start.x, start.y};
  for (int a = 0; a < dim; ++a) {
    AxisRange& r = g.axes_[a];
    const int c = coords[a];
    if (!r.contains(c)) {
      throw ConfigError("start " + to_string(start, dim) + " lies outside [-t_max, t_max]");
    }
    if (c == -t_max) r.lo = -t_max - steps;
    if (c == t_max) r.hi = t_max + steps;
    if (!r.contains(c - steps) || !r.contains(c + steps)) {
      throw ConfigError(std::to_string(steps) + " steps from " + to_string(start, dim) +
                        " would leave the lattice (t_max = " + std::to_string(t_max) + ")");
    }
  }
  return Geometry(dim, t_max, g.axes_[0], g.axes_[1]);
}

bool Geometry::contains(Position pos) const noexcept {
  if (!axes_[0].contains(pos.x)) return false;
  return dim_ == 1 ? pos.y == 0 : axes_[1].contains(pos.y);
}

std::size_t Geometry::site_index(Position pos) const {
  if (!contains(pos)) {
    throw ConfigError("position " + to_string(pos, dim_) + " outside lattice");
  }
  return static_cast<std::size_t>(pos.x - axes_[0].lo) *
             static_cast<std::size_t>(axes_[1].width()) +
         static_cast<std::size_t>(pos.y - axes_[1].lo);
}

Position Geometry::site_position(std::size_t site) const {
  const auto wy = static_cast<std::size_t>(axes_[1].width());
  return {axes_[0].lo + static_cast<int>(site / wy), axes_[1].lo + static_cast<int>(site % wy)};
}

int Geometry::coin_slot(CoinTuple coins) const noexcept {
  if (dim_ == 1) return coins[0] == CoinValue::Minus ? 1 : 0;
  return (coins[0] == CoinValue::Minus ? 2 : 0) + (coins[1] == CoinValue::Minus ? 1 : 0);
}

CoinTuple Geometry::slot_coins(int slot) const noexcept {
  if (dim_ == 1) return {(slot & 1) ? CoinValue::Minus : CoinValue::Plus, CoinValue::Plus};
  return {(slot & 2) ? CoinValue::Minus : CoinValue::Plus,
          (slot & 1) ? CoinValue::Minus : CoinValue::Plus};
}

}  // namespace qwalk
