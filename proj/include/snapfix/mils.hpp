#pragma once

#include <Eigen/Dense>
#include <vector>

namespace snapfix {

/// Weighted mixed-integer least squares: minimize || W (A x + B z - y) ||
/// over real x and integer z, with W = diag(w).
struct MilsProblem {
  Eigen::MatrixXd a;  ///< m x p real-unknown block (p may be 0)
  Eigen::MatrixXd b;  ///< m x q integer-unknown block
  Eigen::VectorXd y;  ///< m right-hand side
  Eigen::VectorXd w;  ///< m positive diagonal weights
};

struct MilsCandidate {
  Eigen::VectorXd z;           ///< integer vector (integral values stored as double)
  double residual_norm = 0.0;  ///< full weighted residual with the matching real solve
};

struct MilsSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd z;
  double residual_norm = 0.0;
  std::vector<MilsCandidate> candidates;  ///< ranked best-first, candidates[0].z == z
  long enum_nodes = 0;                    ///< search-tree nodes visited
};

/// Unimodular transform Z and re-triangularized factor R' of R*Z.
struct LatticeReduction {
  Eigen::MatrixXd z;  ///< q x q unimodular (integer entries, |det| = 1)
  Eigen::MatrixXd r;  ///< q x q upper triangular
};

/// Weighted real least squares; throws DegenerateProblemError on rank deficiency.
Eigen::VectorXd solve_real_ls(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& w);

/// Column-reordering + size-reducing lattice reduction of an upper-triangular factor.
LatticeReduction reduce_lattice(const Eigen::MatrixXd& r);

/// Exact mixed-integer solve: QR elimination of x, lattice reduction, then a
/// depth-first search seeded at the rounded (Babai) point. n_candidates > 1 keeps a
/// ranked list of integer vectors. Residual ties break toward lexicographically
/// smaller z. use_reduction=false skips the reduction step (for diagnostics).
MilsSolution solve_mils(const MilsProblem& p, int n_candidates = 1, bool use_reduction = true);

}  // namespace snapfix
