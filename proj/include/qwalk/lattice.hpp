#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "qwalk/geometry.hpp"
#include "qwalk/rng.hpp"

namespace qwalk {

/// Coin operator installed at a lattice site. BitFlip marks a defect: the
/// walker entering it has its direction reversed on the next step.
enum class CoinKind : std::uint8_t { Hadamard = 0, BitFlip = 1 };

/// Immutable per-site coin assignment over a walk geometry.
class CoinLattice {
 public:
  /// Every site gets `kind`.
  explicit CoinLattice(Geometry geometry, CoinKind kind = CoinKind::Hadamard);
  CoinLattice(Geometry geometry, std::vector<CoinKind> kinds, double p, std::uint64_t seed);

  const Geometry& geometry() const noexcept { return geometry_; }
  /// Probability that a (non-protected) site is open.
  double p() const noexcept { return p_; }
  /// Seed of the stream the lattice was drawn from (0 for hand-built lattices).
  std::uint64_t seed() const noexcept { return seed_; }

  CoinKind kind(std::size_t site) const noexcept { return kinds_[site]; }
  CoinKind at(Position pos) const { return kinds_[geometry_.site_index(pos)]; }
  std::span<const CoinKind> kinds() const noexcept { return kinds_; }

  std::size_t defect_count() const noexcept;
  double defect_fraction() const noexcept;

  friend bool operator==(const CoinLattice&, const CoinLattice&) = default;

 private:
  Geometry geometry_;
  std::vector<CoinKind> kinds_;
  double p_ = 1.0;
  std::uint64_t seed_ = 0;
};

/// Draws one Bernoulli(1 - p) defect per site in site order (row-major, x
/// slow), one 64-bit draw per site including protected sites. Protected sites
/// are always Hadamard.
CoinLattice generate_lattice(const Geometry& geometry, double p,
                             std::span<const Position> protected_sites, RandomStream& rng);

/// Position reached after one noiseless step by a walker localized at |pos, incoming>
/// on a defect site. Always pos - incoming per axis. Throws PreconditionError if
/// the site is not a defect.
Position defect_reversal_check(const CoinLattice& lattice, Position pos, CoinTuple incoming);

/// {dim, t_max, extent, p, seed, kinds} with kinds run-length encoded as
/// [[kind, count], ...], kind 0 = Hadamard and 1 = BitFlip.
nlohmann::json lattice_to_json(const CoinLattice& lattice);
CoinLattice lattice_from_json(const nlohmann::json& j);

}  // namespace qwalk
