#include "qwalk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qwalk/error.hpp"

namespace qwalk {

Distribution::Distribution(Geometry geometry, std::vector<double> probs, int time)
    : geometry_(std::move(geometry)), probs_(std::move(probs)), time_(time) {
  if (probs_.size() != geometry_.num_sites()) {
    throw ConfigError("distribution size does not match the lattice");
  }
}

Distribution Distribution::point_mass(Geometry geometry, Position pos, int time) {
  std::vector<double> probs(geometry.num_sites(), 0.0);
  probs[geometry.site_index(pos)] = 1.0;
  return Distribution(std::move(geometry), std::move(probs), time);
}

double Distribution::total() const noexcept {
  return std::accumulate(probs_.begin(), probs_.end(), 0.0);
}

Position Distribution::argmax() const {
  const auto it = std::max_element(probs_.begin(), probs_.end());
  return geometry_.site_position(static_cast<std::size_t>(it - probs_.begin()));
}

Distribution distribution(const WalkState& state) {
  const Geometry& g = state.geometry();
  const auto cps = static_cast<std::size_t>(g.coins_per_site());
  const auto amps = state.amplitudes();
  std::vector<double> probs(g.num_sites(), 0.0);
  for (std::size_t site = 0; site < probs.size(); ++site) {
    double sum = 0.0;
    for (std::size_t s = 0; s < cps; ++s) {
      const double a = amps[site * cps + s];
      sum += a * a;
    }
    probs[site] = sum;
  }
  return Distribution(g, std::move(probs), state.time());
}

std::array<double, 4> raw_moments(const Distribution& dist) {
  const Geometry& g = dist.geometry();
  const auto probs = dist.probs();
  std::array<double, 4> m{};
  for (std::size_t site = 0; site < probs.size(); ++site) {
    const double p = probs[site];
    if (p == 0.0) continue;
    const Position pos = g.site_position(site);
    m[0] += p * pos.x;
    m[1] += p * pos.x * pos.x;
    m[2] += p * pos.y;
    m[3] += p * pos.y * pos.y;
  }
  return m;
}

double variance(const Distribution& dist) {
  const Geometry& g = dist.geometry();
  const auto probs = dist.probs();
  const auto m = raw_moments(dist);
  const double mx = m[0];
  const double my = m[2];
  double var = 0.0;
  for (std::size_t site = 0; site < probs.size(); ++site) {
    const double p = probs[site];
    if (p == 0.0) continue;
    const Position pos = g.site_position(site);
    const double dx = pos.x - mx;
    const double dy = g.dim() == 2 ? pos.y - my : 0.0;
    var += p * (dx * dx + dy * dy);
  }
  return var;
}

double escape_probability(const Distribution& dist, Boundary boundary) {
  const Geometry& g = dist.geometry();
  const int line = boundary.line(g.t_max());
  if (boundary.t_b < 0 || !g.axis(0).contains(line)) {
    throw ConfigError("escape boundary t_b = " + std::to_string(boundary.t_b) +
                      " lies outside the lattice");
  }
  const auto probs = dist.probs();
  const auto wy = static_cast<std::size_t>(g.axis(1).width());
  const auto first = static_cast<std::size_t>(line + 1 - g.axis(0).lo) * wy;
  return std::accumulate(probs.begin() + static_cast<std::ptrdiff_t>(first), probs.end(), 0.0);
}

MetricSeries metric_series(std::span<const Distribution> snapshots,
                           std::optional<Boundary> boundary) {
  MetricSeries series;
  for (const Distribution& d : snapshots) {
    series.time.push_back(d.time());
    series.variance.push_back(variance(d));
    series.p_esc.push_back(boundary ? escape_probability(d, *boundary)
                                    : std::numeric_limits<double>::quiet_NaN());
    series.stderr_variance.push_back(0.0);
    series.stderr_p_esc.push_back(boundary ? 0.0 : std::numeric_limits<double>::quiet_NaN());
  }
  if (!snapshots.empty()) series.t_max = snapshots.front().geometry().t_max();
  if (boundary) series.t_b = boundary->t_b;
  return series;
}

}  // namespace qwalk
