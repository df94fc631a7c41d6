#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

namespace qwalk {

/// Direction register of one axis: the walker moves by +1 or -1.
enum class CoinValue : std::int8_t { Minus = -1, Plus = 1 };

/// Throws ConfigError unless v is exactly -1 or +1.
CoinValue coin_from_int(int v);

constexpr int to_int(CoinValue c) noexcept { return static_cast<int>(c); }

constexpr CoinValue flipped(CoinValue c) noexcept {
  return c == CoinValue::Plus ? CoinValue::Minus : CoinValue::Plus;
}

/// Coins for every axis; the y entry is ignored in 1D.
using CoinTuple = std::array<CoinValue, 2>;

/// Lattice coordinates; y is ignored (and kept at 0) in 1D.
struct Position {
  int x = 0;
  int y = 0;

  friend bool operator==(const Position&, const Position&) = default;
};

std::string to_string(const Position& pos, int dim);

struct AxisRange {
  int lo = 0;
  int hi = 0;

  int width() const noexcept { return hi - lo + 1; }
  bool contains(int v) const noexcept { return v >= lo && v <= hi; }

  friend bool operator==(const AxisRange&, const AxisRange&) = default;
};

/// The allocated (position x coin) state space of a walk.
///
/// Sites are stored row-major with x as the slow axis. Each site owns
/// 2^dim coin slots; slot bit (dim-1-a) is set when axis a's coin is -1, so
/// in 2D slot = 2*[c_x == -1] + [c_y == -1].
class Geometry {
 public:
  Geometry(int dim, int t_max, AxisRange x_axis, AxisRange y_axis = {0, 0});

  /// The nominal square lattice [-t_max, t_max]^dim.
  static Geometry square(int dim, int t_max);

  /// Nominal lattice, enlarged along any axis whose start coordinate sits on
  /// the boundary (x0 = -t_max grows the low side by `steps`, x0 = t_max the
  /// high side). Throws ConfigError if the light cone of `steps` steps from
  /// `start` does not fit afterwards.
  static Geometry for_walk(int dim, int t_max, Position start, int steps);

  int dim() const noexcept { return dim_; }
  int t_max() const noexcept { return t_max_; }
  const AxisRange& axis(int a) const noexcept { return axes_[static_cast<std::size_t>(a)]; }

  std::size_t num_sites() const noexcept { return num_sites_; }
  int coins_per_site() const noexcept { return dim_ == 1 ? 2 : 4; }
  std::size_t basis_size() const noexcept {
    return num_sites_ * static_cast<std::size_t>(coins_per_site());
  }

  bool contains(Position pos) const noexcept;
  std::size_t site_index(Position pos) const;
  Position site_position(std::size_t site) const;

  int coin_slot(CoinTuple coins) const noexcept;
  CoinTuple slot_coins(int slot) const noexcept;
  std::size_t basis_index(Position pos, CoinTuple coins) const {
    return site_index(pos) * static_cast<std::size_t>(coins_per_site()) +
           static_cast<std::size_t>(coin_slot(coins));
  }

  friend bool operator==(const Geometry&, const Geometry&) = default;

 private:
  int dim_;
  int t_max_;
  std::array<AxisRange, 2> axes_;
  std::size_t num_sites_;
};

}  // namespace qwalk
