#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "qwalk/geometry.hpp"
#include "qwalk/walk_state.hpp"

namespace qwalk {

/// Probability over lattice sites, P(x) or P(x, y), at one time step.
class Distribution {
 public:
  Distribution(Geometry geometry, std::vector<double> probs, int time);

  /// A point mass at pos.
  static Distribution point_mass(Geometry geometry, Position pos, int time = 0);

  const Geometry& geometry() const noexcept { return geometry_; }
  int time() const noexcept { return time_; }
  std::span<const double> probs() const noexcept { return probs_; }
  std::span<double> probs() noexcept { return probs_; }
  double at(Position pos) const { return probs_[geometry_.site_index(pos)]; }
  double total() const noexcept;

  /// Largest-probability site (first in site order on ties).
  Position argmax() const;

 private:
  Geometry geometry_;
  std::vector<double> probs_;
  int time_;
};

/// Sums squared amplitudes over the coin register of every site.
Distribution distribution(const WalkState& state);

/// (sum P x, sum P x^2, sum P y, sum P y^2); the y entries are 0 in 1D.
std::array<double, 4> raw_moments(const Distribution& dist);

/// sum P (x - mu)^2 in 1D, Var(x) + Var(y) in 2D.
double variance(const Distribution& dist);

/// Escape line at offset t_b from the left lattice edge, x_b = -t_max + t_b.
/// Sites with x strictly greater than x_b are outside.
struct Boundary {
  int t_b = 0;

  int line(int t_max) const noexcept { return -t_max + t_b; }
};

/// Probability mass with x > -t_max + t_b, summed over y. Throws ConfigError if
/// the boundary line is outside the lattice.
double escape_probability(const Distribution& dist, Boundary boundary);

/// Per-time metric curves plus the parameters that produced them.
struct MetricSeries {
  std::vector<int> time;
  std::vector<double> variance;
  std::vector<double> p_esc;  // NaN when no boundary is configured
  std::vector<double> stderr_variance;
  std::vector<double> stderr_p_esc;

  double p = 1.0;
  double p_d = 0.0;
  int t_max = 0;
  std::optional<int> t_b;
  int trials = 1;

  std::size_t size() const noexcept { return time.size(); }
};

/// Metric series of a sequence of snapshots, with zero standard errors.
MetricSeries metric_series(std::span<const Distribution> snapshots, std::optional<Boundary> boundary);

}  // namespace qwalk
