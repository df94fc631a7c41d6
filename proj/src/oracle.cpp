#include "qwalk/oracle.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "qwalk/error.hpp"

namespace qwalk::oracle {

namespace {

using Matrix2 = Eigen::Matrix2d;

Matrix2 coin_matrix(CoinKind kind) {
  Matrix2 c;
  if (kind == CoinKind::Hadamard) {
    c << 1.0, 1.0, 1.0, -1.0;
    c /= std::sqrt(2.0);
  } else {
    c << 0.0, 1.0, 1.0, 0.0;
  }
  return c;
}

// Coin slot matrix for one site: the 2x2 coin, or its Kronecker square in 2D
// (x bit is the high bit of the slot index).
Eigen::MatrixXd site_coin(CoinKind kind, int dim) {
  const Matrix2 c = coin_matrix(kind);
  if (dim == 1) return c;
  Eigen::Matrix4d k;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) k(i, j) = c(i / 2, j / 2) * c(i % 2, j % 2);
  }
  return k;
}

Position slot_move(const Geometry& g, int slot) {
  const CoinTuple c = g.slot_coins(slot);
  return {to_int(c[0]), g.dim() == 2 ? to_int(c[1]) : 0};
}

void scale_off_diagonal(Eigen::MatrixXd& rho, double p_d) {
  const double f = (1.0 - 2.0 * p_d) * (1.0 - 2.0 * p_d);
  const Eigen::VectorXd diag = rho.diagonal();
  rho *= f;
  rho.diagonal() = diag;
}

void check_p_d(double p_d) {
  if (!(p_d >= 0.0 && p_d <= 1.0)) throw ConfigError("p_d must lie in [0, 1]");
}

int reversed_slot(int dim, int slot) { return dim == 1 ? slot ^ 1 : 3 - slot; }

}  // namespace

DensityMatrix DensityMatrix::pure(const Eigen::VectorXd& psi) {
  return DensityMatrix(psi * psi.transpose());
}

void DensityMatrix::validate(double tol) const {
  if (rho_.rows() != rho_.cols() || rho_.rows() == 0) {
    throw ValidationError("density matrix must be square and nonempty");
  }
  if ((rho_ - rho_.transpose()).cwiseAbs().maxCoeff() > tol) {
    throw ValidationError("density matrix is not symmetric");
  }
  if (std::abs(rho_.trace() - 1.0) > tol) {
    throw ValidationError("density matrix trace is " + std::to_string(rho_.trace()));
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(rho_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -tol) {
    throw ValidationError("density matrix has a negative eigenvalue " +
                          std::to_string(eig.eigenvalues().minCoeff()));
  }
}

DensityMatrix dephase_channel(const DensityMatrix& rho, double p_d) {
  check_p_d(p_d);
  rho.validate();
  DensityMatrix out = rho;
  scale_off_diagonal(out.matrix(), p_d);
  return out;
}

Eigen::MatrixXd dephase_mixture_exhaustive(const Eigen::MatrixXd& rho, double p_d,
                                           std::size_t max_basis) {
  check_p_d(p_d);
  const auto m = static_cast<std::size_t>(rho.rows());
  if (m > max_basis) {
    throw CapacityError("exhaustive mask enumeration limited to m <= " + std::to_string(max_basis));
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rho.rows(), rho.cols());
  Eigen::VectorXd f(rho.rows());
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    int s = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const bool flip = (mask >> i) & 1U;
      f[static_cast<Eigen::Index>(i)] = flip ? -1.0 : 1.0;
      s += flip ? 1 : 0;
    }
    const double weight = std::pow(p_d, s) * std::pow(1.0 - p_d, static_cast<int>(m) - s);
    if (weight == 0.0) continue;
    out.noalias() += weight * (f.asDiagonal() * rho * f.asDiagonal());
  }
  return out;
}

Eigen::MatrixXd dynamical_matrix(std::size_t m, double p_d, std::size_t max_basis) {
  check_p_d(p_d);
  if (m > max_basis) {
    throw CapacityError("dynamical matrix limited to m <= " + std::to_string(max_basis));
  }
  const auto mm = static_cast<Eigen::Index>(m * m);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(mm);
  Eigen::VectorXd f(static_cast<Eigen::Index>(m));
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    int s = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const bool flip = (mask >> i) & 1U;
      f[static_cast<Eigen::Index>(i)] = flip ? -1.0 : 1.0;
      s += flip ? 1 : 0;
    }
    const double weight = std::pow(p_d, s) * std::pow(1.0 - p_d, static_cast<int>(m) - s);
    if (weight == 0.0) continue;
    // F (x) F for diagonal F: entry (col * m + row) is f[col] * f[row].
    for (Eigen::Index col = 0; col < f.size(); ++col) {
      diag.segment(col * f.size(), f.size()) += weight * f[col] * f;
    }
  }
  return diag.asDiagonal();
}

Eigen::VectorXd vectorize(const Eigen::MatrixXd& rho) {
  return Eigen::Map<const Eigen::VectorXd>(rho.data(), rho.size());
}

Eigen::SparseMatrix<double> step_unitary(const CoinLattice& lattice) {
  const Geometry& g = lattice.geometry();
  const int cps = g.coins_per_site();
  const auto m = static_cast<Eigen::Index>(g.basis_size());
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(g.basis_size() * static_cast<std::size_t>(cps));
  const Eigen::MatrixXd hadamard = site_coin(CoinKind::Hadamard, g.dim());
  const Eigen::MatrixXd bitflip = site_coin(CoinKind::BitFlip, g.dim());
  for (std::size_t site = 0; site < g.num_sites(); ++site) {
    const Position pos = g.site_position(site);
    const Eigen::MatrixXd& coin = lattice.kind(site) == CoinKind::Hadamard ? hadamard : bitflip;
    for (int out = 0; out < cps; ++out) {
      const Position mv = slot_move(g, out);
      const Position target{pos.x + mv.x, pos.y + mv.y};
      // Rows beyond the allocated lattice are dropped; walks never populate them.
      if (!g.contains(target)) continue;
      const auto row = static_cast<Eigen::Index>(g.site_index(target) * cps + out);
      for (int in = 0; in < cps; ++in) {
        const double v = coin(out, in);
        if (v == 0.0) continue;
        entries.emplace_back(row, static_cast<Eigen::Index>(site * cps + in), v);
      }
    }
  }
  Eigen::SparseMatrix<double> u(m, m);
  u.setFromTriplets(entries.begin(), entries.end());
  return u;
}

std::vector<DensityMatrix> evolve_density(const ExperimentConfig& config,
                                          const CoinLattice& lattice, OracleLimits limits) {
  config.validate();
  const Geometry g = config.geometry();
  if (!(g == lattice.geometry())) throw ConfigError("lattice geometry does not match config");
  if (g.basis_size() > limits.max_basis) {
    throw CapacityError("basis size " + std::to_string(g.basis_size()) +
                        " exceeds the oracle cap of " + std::to_string(limits.max_basis));
  }
  const Eigen::SparseMatrix<double> u = step_unitary(lattice);
  const Eigen::SparseMatrix<double> ut = u.transpose();
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.basis_size()));
  psi[static_cast<Eigen::Index>(g.basis_index(config.init.x0, config.init.c0))] = 1.0;

  std::vector<DensityMatrix> out;
  out.reserve(static_cast<std::size_t>(config.steps) + 1);
  out.push_back(DensityMatrix::pure(psi));
  Eigen::MatrixXd rho = out.back().matrix();
  Eigen::MatrixXd tmp;
  for (int t = 1; t <= config.steps; ++t) {
    tmp.noalias() = u * rho;
    rho.noalias() = tmp * ut;
    scale_off_diagonal(rho, config.p_d);
    out.emplace_back(rho);
  }
  return out;
}

Distribution diagonal_distribution(const DensityMatrix& rho, const Geometry& geometry, int time) {
  if (static_cast<std::size_t>(rho.size()) != geometry.basis_size()) {
    throw ConfigError("density matrix does not match the geometry");
  }
  const auto cps = static_cast<Eigen::Index>(geometry.coins_per_site());
  std::vector<double> probs(geometry.num_sites(), 0.0);
  for (std::size_t site = 0; site < probs.size(); ++site) {
    for (Eigen::Index s = 0; s < cps; ++s) {
      const Eigen::Index i = static_cast<Eigen::Index>(site) * cps + s;
      probs[site] += rho.matrix()(i, i);
    }
  }
  return Distribution(geometry, std::move(probs), time);
}

std::vector<Distribution> classical_distributions(const ExperimentConfig& config,
                                                  const CoinLattice& lattice) {
  config.validate();
  const Geometry g = config.geometry();
  if (!(g == lattice.geometry())) throw ConfigError("lattice geometry does not match config");
  const int cps = g.coins_per_site();
  const auto ucps = static_cast<std::size_t>(cps);

  std::vector<double> occ(g.basis_size(), 0.0);
  occ[g.basis_index(config.init.x0, config.init.c0)] = 1.0;
  auto snapshot = [&](int t) {
    std::vector<double> probs(g.num_sites(), 0.0);
    for (std::size_t i = 0; i < occ.size(); ++i) probs[i / ucps] += occ[i];
    return Distribution(g, std::move(probs), t);
  };

  std::vector<Distribution> out;
  out.push_back(snapshot(0));
  std::vector<double> next(occ.size());
  auto deposit = [&](Position from, int slot, double w) {
    const Position mv = slot_move(g, slot);
    const Position to{from.x + mv.x, from.y + mv.y};
    if (!g.contains(to)) throw ConfigError("classical walker left the allocated lattice");
    next[g.site_index(to) * ucps + static_cast<std::size_t>(slot)] += w;
  };
  for (int t = 1; t <= config.steps; ++t) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t site = 0; site < g.num_sites(); ++site) {
      const Position pos = g.site_position(site);
      const bool open = lattice.kind(site) == CoinKind::Hadamard;
      for (int slot = 0; slot < cps; ++slot) {
        const double w = occ[site * ucps + static_cast<std::size_t>(slot)];
        if (w == 0.0) continue;
        if (open) {
          for (int s = 0; s < cps; ++s) deposit(pos, s, w / cps);
        } else {
          deposit(pos, reversed_slot(g.dim(), slot), w);
        }
      }
    }
    occ.swap(next);
    out.push_back(snapshot(t));
  }
  return out;
}

Distribution classical_walk(const ExperimentConfig& config, const CoinLattice& lattice) {
  return classical_distributions(config, lattice).back();
}

ClassicalWalker::ClassicalWalker(const CoinLattice& lattice, const InitialState& init)
    : lattice_(&lattice), position_(init.x0), coins_(init.c0) {
  if (!lattice.geometry().contains(init.x0)) throw ConfigError("walker starts outside the lattice");
}

void ClassicalWalker::step(RandomStream& rng) {
  const Geometry& g = lattice_->geometry();
  if (lattice_->at(position_) == CoinKind::Hadamard) {
    for (int a = 0; a < g.dim(); ++a) {
      coins_[static_cast<std::size_t>(a)] = rng.fair_bit() ? CoinValue::Minus : CoinValue::Plus;
    }
  } else {
    for (int a = 0; a < g.dim(); ++a) {
      coins_[static_cast<std::size_t>(a)] = flipped(coins_[static_cast<std::size_t>(a)]);
    }
  }
  const Position next{position_.x + to_int(coins_[0]),
                      position_.y + (g.dim() == 2 ? to_int(coins_[1]) : 0)};
  if (!g.contains(next)) throw ConfigError("classical walker left the allocated lattice");
  position_ = next;
}

Distribution classical_walk_sampled(const ExperimentConfig& config, const CoinLattice& lattice,
                                    int trials, RandomStream& rng) {
  config.validate();
  if (trials < 1) throw ConfigError("trials must be positive");
  const Geometry& g = lattice.geometry();
  std::vector<double> counts(g.num_sites(), 0.0);
  for (int k = 0; k < trials; ++k) {
    ClassicalWalker walker(lattice, config.init);
    for (int t = 0; t < config.steps; ++t) walker.step(rng);
    counts[g.site_index(walker.position())] += 1.0;
  }
  for (double& c : counts) c /= trials;
  return Distribution(g, std::move(counts), config.steps);
}

double total_variation(const Distribution& a, const Distribution& b) {
  if (!(a.geometry() == b.geometry())) {
    throw ValidationError("total variation needs distributions over the same lattice");
  }
  const auto pa = a.probs();
  const auto pb = b.probs();
  double sum = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) sum += std::abs(pa[i] - pb[i]);
  return 0.5 * sum;
}

}  // namespace qwalk::oracle
