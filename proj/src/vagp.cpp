#include "vagp/vagp.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/SVD>

namespace vagp {

namespace {

constexpr Complex kI{0.0, 1.0};

// Paige-Saunders LSQR; from x0 = 0 the iterates stay in range(A^T), so the
// limit is the minimum-norm least-squares solution.
Eigen::VectorXd lsqr(const SparseReal& A, const Eigen::VectorXd& b, double a_norm, double tol, int max_iter) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(A.cols());
  double beta = b.norm();
  if (beta == 0.0) return x;
  Eigen::VectorXd u = b / beta;
  Eigen::VectorXd v = A.transpose() * u;
  double alpha = v.norm();
  if (alpha == 0.0) return x;
  v /= alpha;
  Eigen::VectorXd w = v;
  double phibar = beta, rhobar = alpha;
  const double b_norm = beta;
  for (int it = 0; it < max_iter; ++it) {
    u = A * v - alpha * u;
    beta = u.norm();
    if (beta > 0) u /= beta;
    v = A.transpose() * u - beta * v;
    alpha = v.norm();
    if (alpha > 0) v /= alpha;
    const double rho = std::hypot(rhobar, beta);
    const double c = rhobar / rho, s = beta / rho;
    const double theta = s * alpha;
    rhobar = -c * alpha;
    const double phi = c * phibar;
    phibar = s * phibar;
    x += (phi / rho) * w;
    w = v - (theta / rho) * w;
    const double normal_residual = phibar * alpha * std::abs(c);
    if (phibar <= tol * b_norm || normal_residual <= tol * a_norm * phibar || alpha == 0.0) return x;
  }
  throw std::runtime_error("LSQR did not converge in " + std::to_string(max_iter) + " iterations");
}

}  // namespace

Eigen::MatrixXd solve_gram(const Eigen::MatrixXd& gram, const Eigen::MatrixXd& rhs, double cutoff) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) throw std::runtime_error("gram eigendecomposition failed");
  const Eigen::VectorXd& lam = eig.eigenvalues();
  const double thresh = cutoff * (lam.size() ? std::max(lam.maxCoeff(), 0.0) : 0.0);
  const Eigen::MatrixXd proj = eig.eigenvectors().transpose() * rhs;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(gram.rows(), rhs.cols());
  for (Eigen::Index c = 0; c < rhs.cols(); ++c) {
    double dropped = 0.0;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      if (lam[i] > thresh)
        w[i] = proj(i, c) / lam[i];
      else
        dropped += proj(i, c) * proj(i, c);
    }
    if (std::sqrt(dropped) > 1e-8 * std::max(rhs.col(c).norm(), 1e-300))
      throw DegenerateSystemError("right-hand side has weight " + std::to_string(std::sqrt(dropped)) +
                                  " on the gram null space");
    x.col(c) = eig.eigenvectors() * w;
  }
  return x;
}

Eigen::MatrixXd solve_least_squares(const SparseReal& A, const Eigen::MatrixXd& y, const SolverOptions& opts) {
  Eigen::MatrixXd x(A.cols(), y.cols());
  if (A.cols() <= opts.dense_limit) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(A), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double thresh = opts.pinv_cutoff * (sv.size() ? sv[0] : 0.0);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv[i] > thresh) inv[i] = 1.0 / sv[i];
    }
    x = svd.matrixV() * inv.asDiagonal() * (svd.matrixU().transpose() * y);
    return x;
  }
  const double a_norm = A.norm();
  const int max_iter = opts.lsqr_max_iterations > 0 ? opts.lsqr_max_iterations : 20 * static_cast<int>(A.cols());
  for (Eigen::Index c = 0; c < y.cols(); ++c) x.col(c) = lsqr(A, y.col(c), a_norm, opts.lsqr_tolerance, max_iter);
  return x;
}

Eigen::VectorXd StackedSystem::stack(const Eigen::VectorXcd& v) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(row_of.size()));
  for (std::size_t r = 0; r < row_of.size(); ++r) {
    const Complex z = v[row_of[r] / 2];
    out[static_cast<Eigen::Index>(r)] = (row_of[r] % 2) ? z.imag() : z.real();
  }
  return out;
}

StackedSystem stack_columns(const SparseComplex& columns) {
  std::vector<char> used(static_cast<std::size_t>(2 * columns.rows()), 0);
  for (Eigen::Index j = 0; j < columns.outerSize(); ++j) {
    for (SparseComplex::InnerIterator it(columns, j); it; ++it) {
      if (it.value().real() != 0.0) used[static_cast<std::size_t>(2 * it.row())] = 1;
      if (it.value().imag() != 0.0) used[static_cast<std::size_t>(2 * it.row() + 1)] = 1;
    }
  }
  StackedSystem out;
  std::vector<Eigen::Index> slot(used.size(), -1);
  for (std::size_t r = 0; r < used.size(); ++r) {
    if (used[r]) {
      slot[r] = static_cast<Eigen::Index>(out.row_of.size());
      out.row_of.push_back(static_cast<Eigen::Index>(r));
    }
  }
  std::vector<Eigen::Triplet<double>> trips;
  for (Eigen::Index j = 0; j < columns.outerSize(); ++j) {
    for (SparseComplex::InnerIterator it(columns, j); it; ++it) {
      if (it.value().real() != 0.0) trips.emplace_back(slot[2 * it.row()], j, it.value().real());
      if (it.value().imag() != 0.0) trips.emplace_back(slot[2 * it.row() + 1], j, it.value().imag());
    }
  }
  out.A.resize(static_cast<Eigen::Index>(out.row_of.size()), columns.cols());
  out.A.setFromTriplets(trips.begin(), trips.end());
  return out;
}

double wrap_half_pi(double phi) {
  constexpr double pi = std::numbers::pi;
  double r = std::fmod(phi + pi / 2, pi);
  if (r < 0) r += pi;
  r -= pi / 2;
  if (r >= pi / 2) r -= pi;
  return r;
}

TransOp VagpSolution::as_operator() const {
  TransOp a;
  for (Eigen::Index n = 0; n < coeffs.size(); ++n) {
    if (coeffs[n] != 0.0) a.add(basis->words[static_cast<std::size_t>(n)], coeffs[n]);
  }
  return a;
}

double VagpSolution::coeff(const std::string& word) const {
  const int n = basis->find(word);
  return n < 0 ? 0.0 : coeffs[n];
}

VagpSolution DirectionalPair::at(double phi) const {
  const double c = std::cos(phi), s = std::sin(phi);
  VagpSolution sol;
  sol.basis = basis;
  sol.point = point;
  sol.phi = phi;
  sol.coeffs = c * c_h + s * c_g;
  sol.norm_sq = sol.coeffs.squaredNorm();
  // <dH, dH> = cos^2 + sin^2 since Z and X are orthonormal.
  sol.residual = std::max(0.0, 1.0 - (c * b_h + s * b_g).dot(sol.coeffs));
  return sol;
}

double DirectionalPair::norm_sq(double phi) const { return (std::cos(phi) * c_h + std::sin(phi) * c_g).squaredNorm(); }

DirectionalPair solve_pair(CouplingPoint point, int k, const SolverOptions& opts) {
  if (k < 1) throw std::invalid_argument("ansatz support k must be >= 1");
  const auto adj = cached_ising_adjoint(k, opts.parity_filter);
  const AdjointSystem sys_h = adj->system(point.h, point.g, TransOp("Z", 1.0));
  DirectionalPair pair;
  pair.basis = adj->basis_ptr();
  pair.point = point;
  pair.b_h = sys_h.rhs;
  Eigen::VectorXcd dx = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(adj->row_words().size()));
  if (const int r = adj->row_of("X"); r >= 0) dx[r] = 1.0;
  pair.b_g = -(sys_h.columns.adjoint() * dx).real();
  const StackedSystem st = stack_columns(sys_h.columns);
  Eigen::MatrixXd y(st.A.rows(), 2);
  y.col(0) = -st.stack(sys_h.dh);
  y.col(1) = -st.stack(dx);
  const Eigen::MatrixXd x = solve_least_squares(st.A, y, opts);
  pair.c_h = x.col(0);
  pair.c_g = x.col(1);
  return pair;
}

VagpSolution solve(CouplingPoint point, double phi, int k, const SolverOptions& opts) {
  return solve_pair(point, k, opts).at(phi);
}

VagpSolution solve_general(const TransOp& H, const TransOp& dH, int k, const SolverOptions& opts) {
  if (k < 1) throw std::invalid_argument("ansatz support k must be >= 1");
  const AdjointSystem sys = assemble(cached_basis(k, opts.parity_filter), H, dH, opts.workers);
  VagpSolution sol;
  sol.basis = sys.basis;
  const StackedSystem st = stack_columns(sys.columns);
  sol.coeffs = solve_least_squares(st.A, -st.stack(sys.dh), opts).col(0);
  sol.norm_sq = sol.coeffs.squaredNorm();
  sol.residual = std::max(0.0, sys.dh_norm_sq - sys.rhs.dot(sol.coeffs));
  return sol;
}

OptimalDirection optimal_angle(const DirectionalPair& pair) {
  constexpr double pi = std::numbers::pi;
  const double qxx = pair.c_h.squaredNorm();
  const double qyy = pair.c_g.squaredNorm();
  const double qxy = pair.c_h.dot(pair.c_g);
  OptimalDirection out;
  const double spread = std::hypot(qxx - qyy, 2 * qxy);
  if (spread <= 1e-12 * std::max(1.0, qxx + qyy)) {
    out.isotropic = true;
    out.phi_opt = 0.0;
  } else {
    const double alpha_max = 0.5 * std::atan2(2 * qxy, qxx - qyy);
    out.phi_opt = wrap_half_pi(alpha_max + pi / 2);
  }
  out.phi_orth = wrap_half_pi(out.phi_opt + pi / 2);
  out.norm_opt = std::sqrt(pair.norm_sq(out.phi_opt));
  out.norm_orth = std::sqrt(pair.norm_sq(out.phi_orth));
  out.anisotropy = out.norm_opt > 0 ? std::log10(out.norm_orth / out.norm_opt)
                                    : (out.norm_orth > 0 ? std::numeric_limits<double>::infinity() : 0.0);
  return out;
}

OptimalDirection optimal_angle(CouplingPoint point, int k, const SolverOptions& opts) {
  return optimal_angle(solve_pair(point, k, opts));
}

LifetimeResult lifetime(const VagpSolution& solution) {
  const TransOp H = build_hamiltonian(solution.point.h, solution.point.g);
  TransOp G = std::cos(solution.phi) * TransOp("Z", 1.0) + std::sin(solution.phi) * TransOp("X", 1.0);
  G += kI * trans_commutator(solution.as_operator(), H);
  G.prune(1e-13);
  LifetimeResult out;
  out.g_norm_sq = trans_inner(G, G).real();
  if (out.g_norm_sq <= 1e-24) {
    out.conserved = true;
    return out;
  }
  const TransOp hg = trans_commutator(H, G);
  out.gamma = std::sqrt(std::max(0.0, trans_inner(hg, hg).real() / out.g_norm_sq));
  return out;
}

LifetimeResult lifetime(CouplingPoint point, double phi, int k, const SolverOptions& opts) {
  return lifetime(solve(point, phi, k, opts));
}

}  // namespace vagp
