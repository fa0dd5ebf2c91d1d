#include "vagp/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include <lapacke.h>

namespace vagp::exact {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_sites(int L) {
  if (L < 1 || L > kMaxDenseSites) {
    throw std::invalid_argument("chain length must be in [1, " + std::to_string(kMaxDenseSites) +
                                "], got " + std::to_string(L));
  }
}

std::uint32_t site_bit(int L, int site) { return std::uint32_t{1} << (L - 1 - site); }

void fix_phases(Eigen::MatrixXcd& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index imax = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&imax);
    const Complex pivot = vectors(imax, c);
    vectors.col(c) *= std::conj(pivot) / std::abs(pivot);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// SpinOperator

SpinOperator::Group& SpinOperator::group_for(std::uint32_t flip) {
  for (auto& g : groups_) {
    if (g.flip == flip) return g;
  }
  groups_.push_back({flip, Eigen::VectorXcd::Zero(dim())});
  return groups_.back();
}

void SpinOperator::add_string(const std::string& ring_letters, Complex coeff) {
  const int L = L_;
  const Eigen::Index n = dim();
  for (int t = 0; t < L; ++t) {
    std::uint32_t flip = 0;
    std::uint32_t sign_mask = 0;
    int ny = 0;
    for (int j = 0; j < L; ++j) {
      const std::uint32_t bit = site_bit(L, (j + t) % L);
      switch (ring_letters[j]) {
        case 'X': flip |= bit; break;
        case 'Y': flip |= bit; sign_mask |= bit; ++ny; break;
        case 'Z': sign_mask |= bit; break;
        default: break;
      }
    }
    // Y|up> = i|down>, Y|down> = -i|up>, Z|down> = -|down>.
    Complex base = coeff;
    for (int q = 0; q < (ny & 3); ++q) base *= kI;
    Group& g = group_for(flip);
    for (Eigen::Index s = 0; s < n; ++s) {
      const bool odd = std::popcount(static_cast<std::uint32_t>(s) & sign_mask) & 1;
      g.diag[s] += odd ? -base : base;
    }
  }
}

SpinOperator SpinOperator::compile(const TransOp& op, int L) {
  check_sites(L);
  if (op.max_support() > L) {
    throw std::invalid_argument("chain length " + std::to_string(L) + " is shorter than operator support " +
                                std::to_string(op.max_support()));
  }
  SpinOperator out;
  out.L_ = L;
  for (const auto& [w, c] : op.terms()) {
    std::string ring = w;
    ring.resize(static_cast<std::size_t>(L), 'I');
    out.add_string(ring, c);
  }
  return out;
}

SpinOperator SpinOperator::compile_ring_string(std::string_view ring_letters, Complex coeff) {
  const int L = static_cast<int>(ring_letters.size());
  check_sites(L);
  SpinOperator out;
  out.L_ = L;
  out.add_string(std::string(ring_letters), coeff);
  return out;
}

void SpinOperator::apply(const StateVector& in, StateVector& out, Complex scale, bool accumulate) const {
  const Eigen::Index n = dim();
  if (in.size() != n) throw std::invalid_argument("state dimension does not match operator");
  if (!accumulate || out.size() != n) out = StateVector::Zero(n);
  for (const auto& g : groups_) {
    const Complex* d = g.diag.data();
    const Complex* x = in.data();
    Complex* y = out.data();
    const auto flip = static_cast<Eigen::Index>(g.flip);
    if (scale == Complex{1.0}) {
      for (Eigen::Index s = 0; s < n; ++s) y[s ^ flip] += d[s] * x[s];
    } else {
      for (Eigen::Index s = 0; s < n; ++s) y[s ^ flip] += scale * d[s] * x[s];
    }
  }
}

StateVector SpinOperator::operator*(const StateVector& in) const {
  StateVector out;
  apply(in, out);
  return out;
}

Eigen::MatrixXcd SpinOperator::to_dense() const {
  const Eigen::Index n = dim();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& g : groups_) {
    for (Eigen::Index s = 0; s < n; ++s) m(s ^ static_cast<Eigen::Index>(g.flip), s) += g.diag[s];
  }
  return m;
}

SpinOperator& SpinOperator::operator+=(const SpinOperator& other) {
  if (L_ == 0) return *this = other;
  if (other.L_ != L_) throw std::invalid_argument("chain length mismatch");
  for (const auto& g : other.groups_) group_for(g.flip).diag += g.diag;
  return *this;
}

SpinOperator& SpinOperator::operator*=(Complex s) {
  for (auto& g : groups_) g.diag *= s;
  return *this;
}

// ---------------------------------------------------------------------------

DenseOperator materialize(const TransOp& op, int L) {
  return {L, SpinOperator::compile(op, L).to_dense()};
}

SpectrumData diagonalize(const DenseOperator& H) {
  const auto n = static_cast<lapack_int>(H.matrix.rows());
  SpectrumData out;
  out.energies.resize(n);
  if (H.is_real()) {
    Eigen::MatrixXd a = H.matrix.real();
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, out.energies.data());
    if (info != 0) throw std::runtime_error("dsyevd failed with info " + std::to_string(info));
    out.vectors = a.cast<Complex>();
  } else {
    Eigen::MatrixXcd a = H.matrix;
    const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n,
                                           reinterpret_cast<lapack_complex_double*>(a.data()), n,
                                           out.energies.data());
    if (info != 0) throw std::runtime_error("zheevd failed with info " + std::to_string(info));
    out.vectors = std::move(a);
  }
  fix_phases(out.vectors);
  return out;
}

double default_degeneracy_tol(const SpectrumData& spectrum) {
  return 1e-10 * spectrum.energies.cwiseAbs().maxCoeff();
}

DenseOperator exact_agp(const SpectrumData& spectrum, const DenseOperator& dH, std::optional<double> degeneracy_tol) {
  const double tol = degeneracy_tol.value_or(default_degeneracy_tol(spectrum));
  const Eigen::MatrixXcd& V = spectrum.vectors;
  Eigen::MatrixXcd D = V.adjoint() * dH.matrix * V;
  const Eigen::Index n = D.rows();
  for (Eigen::Index col = 0; col < n; ++col) {
    for (Eigen::Index row = 0; row < n; ++row) {
      const double gap = spectrum.energies[col] - spectrum.energies[row];
      D(row, col) = std::abs(gap) > tol ? kI * D(row, col) / gap : Complex{};
    }
  }
  return {dH.L, V * D * V.adjoint()};
}

DenseOperator exact_agp(const DenseOperator& H, const DenseOperator& dH, std::optional<double> degeneracy_tol) {
  return exact_agp(diagonalize(H), dH, degeneracy_tol);
}

double energy_variance(const StateVector& psi, const DenseOperator& H) {
  const StateVector hpsi = H.matrix * psi;
  const double mean = psi.dot(hpsi).real();
  return std::max(0.0, hpsi.squaredNorm() - mean * mean);
}

double energy_expectation(const StateVector& psi, const SpinOperator& H) { return psi.dot(H * psi).real(); }

double energy_variance(const StateVector& psi, const SpinOperator& H) {
  const StateVector hpsi = H * psi;
  const double mean = psi.dot(hpsi).real();
  return std::max(0.0, hpsi.squaredNorm() - mean * mean);
}

std::pair<Eigen::Index, StateVector> mid_spectrum_state(const SpectrumData& spectrum) {
  const double mean = spectrum.energies.mean();
  Eigen::Index best = 0;
  double best_dist = std::abs(spectrum.energies[0] - mean);
  for (Eigen::Index i = 1; i < spectrum.energies.size(); ++i) {
    const double d = std::abs(spectrum.energies[i] - mean);
    if (d < best_dist) {
      best = i;
      best_dist = d;
    }
  }
  return {best, spectrum.vectors.col(best)};
}

std::pair<Eigen::Index, StateVector> mid_spectrum_state(const DenseOperator& H) {
  if (!H.is_real()) return mid_spectrum_state(diagonalize(H));
  const auto n = static_cast<lapack_int>(H.matrix.rows());
  Eigen::MatrixXd a = H.matrix.real();
  Eigen::VectorXd energies(n);
  lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', n, a.data(), n, energies.data());
  if (info != 0) throw std::runtime_error("dsyevd failed with info " + std::to_string(info));
  const double mean = energies.mean();
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < n; ++i) {
    if (std::abs(energies[i] - mean) < std::abs(energies[best] - mean)) best = i;
  }
  a = H.matrix.real();
  lapack_int found = 0;
  Eigen::VectorXd w(n);
  Eigen::MatrixXd z(n, 1);
  std::vector<lapack_int> support(2);
  const auto idx = static_cast<lapack_int>(best + 1);
  info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', n, a.data(), n, 0.0, 0.0, idx, idx, 0.0, &found, w.data(),
                        z.data(), n, support.data());
  if (info != 0 || found != 1) throw std::runtime_error("dsyevr failed with info " + std::to_string(info));
  Eigen::MatrixXcd v = z.cast<Complex>();
  fix_phases(v);
  return {best, v.col(0)};
}

StateVector product_state(std::string_view spins) {
  std::vector<bool> down;
  for (std::size_t i = 0; i < spins.size(); ++i) {
    const char c = spins[i];
    if (c == 'u' || c == 'U' || c == '0') {
      down.push_back(false);
    } else if (c == 'd' || c == 'D' || c == '1') {
      down.push_back(true);
    } else if (spins.substr(i).starts_with("↑")) {
      down.push_back(false);
      i += 2;
    } else if (spins.substr(i).starts_with("↓")) {
      down.push_back(true);
      i += 2;
    } else if (c != ' ' && c != '|' && c != '>') {
      throw std::invalid_argument("unrecognized spin symbol in product state");
    }
  }
  const int L = static_cast<int>(down.size());
  check_sites(L);
  std::uint32_t index = 0;
  for (int j = 0; j < L; ++j) {
    if (down[j]) index |= site_bit(L, j);
  }
  StateVector psi = StateVector::Zero(Eigen::Index{1} << L);
  psi[index] = 1.0;
  return psi;
}

Complex dense_inner(const DenseOperator& a, const DenseOperator& b) {
  const double norm = static_cast<double>(a.L) * static_cast<double>(a.matrix.rows());
  return (a.matrix.adjoint() * b.matrix).trace() / norm;
}

// ---------------------------------------------------------------------------

int ring_support(std::string_view ring_letters) {
  const int L = static_cast<int>(ring_letters.size());
  int longest_gap = 0;
  bool any = false;
  for (int start = 0; start < L; ++start) {
    int run = 0;
    while (run < L && ring_letters[(start + run) % L] == 'I') ++run;
    longest_gap = std::max(longest_gap, run);
    any = any || ring_letters[start] != 'I';
  }
  return any ? L - longest_gap : 0;
}

RingBasis ring_basis(int L, int k, bool odd_y_only) {
  if (L < 1 || L > 8) throw std::invalid_argument("ring basis supports 1 <= L <= 8");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  constexpr char letters[4] = {'I', 'X', 'Y', 'Z'};
  RingBasis basis{L, k, {}};
  const std::uint64_t total = std::uint64_t{1} << (2 * L);
  std::string s(static_cast<std::size_t>(L), 'I');
  for (std::uint64_t code = 1; code < total; ++code) {
    for (int j = 0; j < L; ++j) s[j] = letters[(code >> (2 * (L - 1 - j))) & 3];
    bool is_rep = true;
    for (int r = 1; r < L && is_rep; ++r) {
      const std::string rot = s.substr(r) + s.substr(0, r);
      if (rot < s) is_rep = false;
    }
    if (!is_rep) continue;
    if (ring_support(s) > k) continue;
    if (odd_y_only && (std::count(s.begin(), s.end(), 'Y') % 2 == 0)) continue;
    basis.words.push_back(s);
  }
  return basis;
}

RingVagp ring_vagp(const DenseOperator& H, const DenseOperator& dH, const RingBasis& basis) {
  const int L = H.L;
  if (basis.L != L || dH.L != L) throw std::invalid_argument("ring basis and operators disagree on L");
  const Eigen::Index dim = H.matrix.rows();
  const auto nb = static_cast<Eigen::Index>(basis.words.size());
  const double site_norm = static_cast<double>(L) * static_cast<double>(dim);

  std::vector<Eigen::MatrixXcd> ops;
  ops.reserve(basis.words.size());
  Eigen::MatrixXcd W(dim * dim, nb);
  for (Eigen::Index n = 0; n < nb; ++n) {
    Eigen::MatrixXcd O = SpinOperator::compile_ring_string(basis.words[n], 1.0).to_dense();
    O /= std::sqrt(O.squaredNorm() / site_norm);
    Eigen::MatrixXcd w = kI * (O * H.matrix - H.matrix * O);
    W.col(n) = Eigen::Map<const Eigen::VectorXcd>(w.data(), dim * dim);
    ops.push_back(std::move(O));
  }
  const Eigen::Map<const Eigen::VectorXcd> d(dH.matrix.data(), dim * dim);
  const Eigen::MatrixXd gram = (W.adjoint() * W).real() / site_norm;
  const Eigen::VectorXd rhs = -(W.adjoint() * d).real() / site_norm;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  const double cutoff = 1e-10 * es.eigenvalues().cwiseAbs().maxCoeff();
  Eigen::VectorXd proj = es.eigenvectors().transpose() * rhs;
  for (Eigen::Index i = 0; i < proj.size(); ++i) {
    proj[i] = es.eigenvalues()[i] > cutoff ? proj[i] / es.eigenvalues()[i] : 0.0;
  }
  RingVagp out;
  out.coeffs = es.eigenvectors() * proj;
  out.agp = {L, Eigen::MatrixXcd::Zero(dim, dim)};
  for (Eigen::Index n = 0; n < nb; ++n) out.agp.matrix += out.coeffs[n] * ops[n];
  const Eigen::MatrixXcd G = dH.matrix + kI * (out.agp.matrix * H.matrix - H.matrix * out.agp.matrix);
  out.residual = G.squaredNorm() / site_norm;
  return out;
}

}  // namespace vagp::exact
