#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "qwalk/lattice.hpp"
#include "qwalk/metrics.hpp"
#include "qwalk/montecarlo.hpp"
#include "qwalk/rng.hpp"

// Exact, slow reference computations used to check the stochastic engine.
namespace qwalk::oracle {

/// Real symmetric density matrix over the walk basis (same labeling as
/// WalkState amplitudes).
class DensityMatrix {
 public:
  explicit DensityMatrix(Eigen::MatrixXd rho) : rho_(std::move(rho)) {}

  /// |psi><psi|.
  static DensityMatrix pure(const Eigen::VectorXd& psi);

  Eigen::Index size() const noexcept { return rho_.rows(); }
  const Eigen::MatrixXd& matrix() const noexcept { return rho_; }
  Eigen::MatrixXd& matrix() noexcept { return rho_; }

  double trace() const { return rho_.trace(); }
  /// Tr(rho^2).
  double purity() const { return rho_.cwiseProduct(rho_).sum(); }

  /// Throws ValidationError unless rho is square, symmetric, has unit trace and
  /// no eigenvalue below -tol.
  void validate(double tol = 1e-9) const;

 private:
  Eigen::MatrixXd rho_;
};

/// Averaged sign-flip channel: diagonal kept, every off-diagonal entry scaled
/// by (1 - 2 p_d)^2. Validates the input.
DensityMatrix dephase_channel(const DensityMatrix& rho, double p_d);

/// The same channel as an explicit mixture sum_j p_j F_j rho F_j over all 2^m
/// sign patterns F_j, p_j = p_d^s (1 - p_d)^(m - s). Throws CapacityError for
/// m > max_basis.
Eigen::MatrixXd dephase_mixture_exhaustive(const Eigen::MatrixXd& rho, double p_d,
                                           std::size_t max_basis = 16);

/// Dynamical matrix D = sum_j p_j F_j (x) F_j, an m^2 x m^2 diagonal matrix acting
/// on column-stacked rho. Throws CapacityError for m > max_basis.
Eigen::MatrixXd dynamical_matrix(std::size_t m, double p_d, std::size_t max_basis = 12);

/// Column-stacking vec(rho).
Eigen::VectorXd vectorize(const Eigen::MatrixXd& rho);

/// One noiseless step (shift after coin) as a sparse orthogonal matrix, built
/// directly from the coin matrices and the shift rule.
Eigen::SparseMatrix<double> step_unitary(const CoinLattice& lattice);

struct OracleLimits {
  /// Largest basis dimension m for density-matrix evolution.
  std::size_t max_basis = 64;
};

/// Exact mixed states rho_t for t = 0..steps (index = time), evolving
/// rho -> dephase_channel(U rho U^T, p_d). Throws CapacityError when the basis
/// exceeds the limit.
std::vector<DensityMatrix> evolve_density(const ExperimentConfig& config,
                                          const CoinLattice& lattice, OracleLimits limits = {});

/// diag(rho) summed over coins.
Distribution diagonal_distribution(const DensityMatrix& rho, const Geometry& geometry, int time);

/// Exact classical walk by dynamic programming over (site, coin) occupancy:
/// at an open site the new coin is uniform on every axis, at a defect every
/// coin reverses, then x -> x + c. Returns t = 0..steps (index = time).
std::vector<Distribution> classical_distributions(const ExperimentConfig& config,
                                                  const CoinLattice& lattice);

/// Final-step distribution of classical_distributions.
Distribution classical_walk(const ExperimentConfig& config, const CoinLattice& lattice);

/// Empirical final distribution of `trials` sampled classical walkers.
Distribution classical_walk_sampled(const ExperimentConfig& config, const CoinLattice& lattice,
                                    int trials, RandomStream& rng);

/// One classical walker; exactly one occupied site at every step.
class ClassicalWalker {
 public:
  ClassicalWalker(const CoinLattice& lattice, const InitialState& init);

  Position position() const noexcept { return position_; }
  CoinTuple coins() const noexcept { return coins_; }
  void step(RandomStream& rng);

 private:
  const CoinLattice* lattice_;
  Position position_;
  CoinTuple coins_;
};

/// (1/2) sum |a - b|. Throws ValidationError if the supports differ.
double total_variation(const Distribution& a, const Distribution& b);

}  // namespace qwalk::oracle
