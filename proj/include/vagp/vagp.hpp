#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "vagp/ansatz.hpp"
#include "vagp/pauli.hpp"

namespace vagp {

struct CouplingPoint {
  double h = 0.0;
  double g = 0.0;
};

struct SolverOptions {
  bool parity_filter = true;
  // Bases up to this size use a dense SVD of the commutator matrix; larger
  // ones use LSQR started from zero, which also converges to the minimum-norm
  // least-squares solution.
  int dense_limit = 600;
  double pinv_cutoff = 1e-10;  // relative to the largest singular value
  double lsqr_tolerance = 1e-14;
  int lsqr_max_iterations = 0;  // 0: 20 * dimension
  int workers = 1;
};

/// The gram matrix has a null direction that the right-hand side is not orthogonal to.
class DegenerateSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Minimizer of the action over the k-body basis for dH = cos(phi) Z + sin(phi) X.
struct VagpSolution {
  std::shared_ptr<const AnsatzBasis> basis;
  Eigen::VectorXd coeffs;
  double norm_sq = 0.0;
  double residual = 0.0;
  CouplingPoint point;
  double phi = 0.0;

  int k() const { return basis ? basis->k : 0; }
  /// A = sum_n c_n O_n.
  TransOp as_operator() const;
  double coeff(const std::string& word) const;
};

/// Pseudo-inverse solve of gram * x = rhs (one column per right-hand side).
/// Throws DegenerateSystemError if a right-hand side has weight on the null space.
Eigen::MatrixXd solve_gram(const Eigen::MatrixXd& gram, const Eigen::MatrixXd& rhs, double cutoff = 1e-10);

/// Minimum-norm real c minimizing ||y - A c|| for each column of y. A is the
/// commutator matrix with real and imaginary parts stacked as separate rows.
/// Equivalent to pinv(A^T A) A^T y without squaring the condition number.
Eigen::MatrixXd solve_least_squares(const SparseReal& A, const Eigen::MatrixXd& y, const SolverOptions& opts = {});

/// Stacks Re/Im rows of the commutator columns; rows that are zero in both are dropped.
struct StackedSystem {
  SparseReal A;
  std::vector<Eigen::Index> row_of;  // stacked row -> 2 * row + (imag ? 1 : 0)
  Eigen::VectorXd stack(const Eigen::VectorXcd& v) const;
};
StackedSystem stack_columns(const SparseComplex& columns);

/// Solutions for the two coupling directions (phi = 0 is h, phi = pi/2 is g).
/// Any other direction is their cos/sin combination.
struct DirectionalPair {
  std::shared_ptr<const AnsatzBasis> basis;
  CouplingPoint point;
  Eigen::VectorXd c_h, c_g;  // coefficients for dH = Z and dH = X
  Eigen::VectorXd b_h, b_g;  // matching right-hand sides

  VagpSolution at(double phi) const;
  /// Per-site squared norm of the solution at angle phi.
  double norm_sq(double phi) const;
};

DirectionalPair solve_pair(CouplingPoint point, int k, const SolverOptions& opts = {});

VagpSolution solve(CouplingPoint point, double phi, int k, const SolverOptions& opts = {});

/// Solve for arbitrary Hermitian H and dH (generic assembly, no template cache).
VagpSolution solve_general(const TransOp& H, const TransOp& dH, int k, const SolverOptions& opts = {});

struct OptimalDirection {
  double phi_opt = 0.0;   // in [-pi/2, pi/2)
  double phi_orth = 0.0;  // in [-pi/2, pi/2)
  double norm_opt = 0.0;  // per-site norms
  double norm_orth = 0.0;
  double anisotropy = 0.0;  // log10(norm_orth / norm_opt); +inf if norm_opt = 0
  bool isotropic = false;
};

OptimalDirection optimal_angle(const DirectionalPair& pair);
OptimalDirection optimal_angle(CouplingPoint point, int k, const SolverOptions& opts = {});

/// Maps an angle onto [-pi/2, pi/2) modulo pi.
double wrap_half_pi(double phi);

struct LifetimeResult {
  double gamma = 0.0;
  double g_norm_sq = 0.0;  // <G, G>
  bool conserved = false;  // G vanished: dH is fully generated by the commutator
};

/// Decay rate of G = dH + i[A, H]: gamma^2 = <[H,G],[H,G]> / <G,G>.
LifetimeResult lifetime(const VagpSolution& solution);
LifetimeResult lifetime(CouplingPoint point, double phi, int k, const SolverOptions& opts = {});

}  // namespace vagp
