#include "qwalk/lattice.hpp"

#include <algorithm>

#include "qwalk/error.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

CoinLattice::CoinLattice(Geometry geometry, CoinKind kind)
    : geometry_(std::move(geometry)),
      kinds_(geometry_.num_sites(), kind),
      p_(kind == CoinKind::Hadamard ? 1.0 : 0.0) {}

CoinLattice::CoinLattice(Geometry geometry, std::vector<CoinKind> kinds, double p,
                         std::uint64_t seed)
    : geometry_(std::move(geometry)), kinds_(std::move(kinds)), p_(p), seed_(seed) {
  if (kinds_.size() != geometry_.num_sites()) {
    throw ConfigError("lattice has " + std::to_string(kinds_.size()) + " sites, geometry needs " +
                      std::to_string(geometry_.num_sites()));
  }
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p must lie in [0, 1]");
}

std::size_t CoinLattice::defect_count() const noexcept {
  return static_cast<std::size_t>(std::count(kinds_.begin(), kinds_.end(), CoinKind::BitFlip));
}

double CoinLattice::defect_fraction() const noexcept {
  return static_cast<double>(defect_count()) / static_cast<double>(kinds_.size());
}

CoinLattice generate_lattice(const Geometry& geometry, double p,
                             std::span<const Position> protected_sites, RandomStream& rng) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError("p must lie in [0, 1], got " + std::to_string(p));
  }
  for (const Position& pos : protected_sites) {
    if (!geometry.contains(pos)) {
      throw ConfigError("protected site " + to_string(pos, geometry.dim()) + " outside lattice");
    }
  }
  const BernoulliThreshold defect(1.0 - p);
  std::vector<CoinKind> kinds(geometry.num_sites());
  for (auto& k : kinds) k = defect(rng) ? CoinKind::BitFlip : CoinKind::Hadamard;
  for (const Position& pos : protected_sites) kinds[geometry.site_index(pos)] = CoinKind::Hadamard;
  return CoinLattice(geometry, std::move(kinds), p, rng.seed());
}

Position defect_reversal_check(const CoinLattice& lattice, Position pos, CoinTuple incoming) {
  const Geometry& g = lattice.geometry();
  if (lattice.at(pos) != CoinKind::BitFlip) {
    throw PreconditionError("site " + to_string(pos, g.dim()) + " is not a defect");
  }
  WalkState state(g);
  state.set_amplitude(pos, incoming, 1.0);
  const WalkState next = apply_step(apply_coin(state, lattice));
  const auto amps = next.amplitudes();
  const auto it = std::find_if(amps.begin(), amps.end(), [](double a) { return a != 0.0; });
  const auto index = static_cast<std::size_t>(it - amps.begin());
  return g.site_position(index / static_cast<std::size_t>(g.coins_per_site()));
}

nlohmann::json lattice_to_json(const CoinLattice& lattice) {
  const Geometry& g = lattice.geometry();
  nlohmann::json runs = nlohmann::json::array();
  const auto kinds = lattice.kinds();
  for (std::size_t i = 0; i < kinds.size();) {
    std::size_t j = i;
    while (j < kinds.size() && kinds[j] == kinds[i]) ++j;
    runs.push_back({static_cast<int>(kinds[i]), j - i});
    i = j;
  }
  nlohmann::json extent = nlohmann::json::array();
  for (int a = 0; a < g.dim(); ++a) extent.push_back({g.axis(a).lo, g.axis(a).hi});
  return {{"dim", g.dim()},      {"t_max", g.t_max()},      {"extent", extent},
          {"p", lattice.p()},    {"seed", lattice.seed()},  {"kinds", runs}};
}

CoinLattice lattice_from_json(const nlohmann::json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    const auto& extent = j.at("extent");
    if (static_cast<int>(extent.size()) != dim) throw ConfigError("extent does not match dim");
    const AxisRange x{extent[0][0].get<int>(), extent[0][1].get<int>()};
    const AxisRange y = dim == 2 ? AxisRange{extent[1][0].get<int>(), extent[1][1].get<int>()}
                                 : AxisRange{0, 0};
    Geometry g(dim, j.at("t_max").get<int>(), x, y);
    std::vector<CoinKind> kinds;
    kinds.reserve(g.num_sites());
    for (const auto& run : j.at("kinds")) {
      const int k = run.at(0).get<int>();
      if (k != 0 && k != 1) throw ConfigError("unknown coin kind " + std::to_string(k));
      kinds.insert(kinds.end(), run.at(1).get<std::size_t>(), static_cast<CoinKind>(k));
    }
    return CoinLattice(g, std::move(kinds), j.at("p").get<double>(),
                       j.at("seed").get<std::uint64_t>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed lattice JSON: ") + e.what());
  }
}

}  // namespace qwalk
