#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "vagp/pauli.hpp"

namespace vagp::exact {

/// Largest periodic chain materialized densely (2^14 x 2^14).
inline constexpr int kMaxDenseSites = 14;

using StateVector = Eigen::VectorXcd;

/// Matrix-free operator on a periodic chain of L spins, stored as
/// (spin-flip mask, diagonal) groups: out[s ^ flip] += diag[s] * in[s].
///
/// Site j is bit (L - 1 - j) of the basis index, so index 0 is all spins up
/// and the ordering matches the tensor product with site 0 leftmost.
class SpinOperator {
 public:
  SpinOperator() = default;

  /// Sum over the L cyclic translations of every word in `op`.
  static SpinOperator compile(const TransOp& op, int L);

  /// Sum over the L cyclic translations of a length-L ring string (letters IXYZ).
  static SpinOperator compile_ring_string(std::string_view ring_letters, Complex coeff);

  int sites() const { return L_; }
  Eigen::Index dim() const { return Eigen::Index{1} << L_; }

  /// out = scale * Op * in (accumulate=false) or out += scale * Op * in.
  void apply(const StateVector& in, StateVector& out, Complex scale = 1.0, bool accumulate = false) const;
  StateVector operator*(const StateVector& in) const;

  Eigen::MatrixXcd to_dense() const;

  SpinOperator& operator+=(const SpinOperator& other);
  SpinOperator& operator*=(Complex s);

 private:
  struct Group {
    std::uint32_t flip;
    Eigen::VectorXcd diag;
  };
  Group& group_for(std::uint32_t flip);
  void add_string(const std::string& ring_letters, Complex coeff);

  int L_ = 0;
  std::vector<Group> groups_;
};

/// Dense matrix of a translation-invariant operator on a periodic chain.
struct DenseOperator {
  int L = 0;
  Eigen::MatrixXcd matrix;

  bool is_real() const { return matrix.imag().cwiseAbs().maxCoeff() == 0.0; }
};

/// Eigen-decomposition of a Hermitian operator; energies ascending.
struct SpectrumData {
  Eigen::VectorXd energies;
  Eigen::MatrixXcd vectors;
};

/// Sum over L cyclic translations of every word. Throws if L < max support or L > 14.
DenseOperator materialize(const TransOp& op, int L);

/// Hermitian diagonalization (LAPACK). Each eigenvector is fixed so that its
/// largest-magnitude component is real and positive.
SpectrumData diagonalize(const DenseOperator& H);

/// Default degeneracy tolerance: 1e-10 * max |eigenvalue|.
double default_degeneracy_tol(const SpectrumData& spectrum);

/// Exact gauge potential A = i sum_{m != n} |m><m|dH|n><n| / (e_n - e_m); pairs
/// closer than the tolerance get zero (block-diagonal gauge).
DenseOperator exact_agp(const DenseOperator& H, const DenseOperator& dH,
                        std::optional<double> degeneracy_tol = std::nullopt);
DenseOperator exact_agp(const SpectrumData& spectrum, const DenseOperator& dH,
                        std::optional<double> degeneracy_tol = std::nullopt);

/// <H^2> - <H>^2 for a normalized state.
double energy_variance(const StateVector& psi, const DenseOperator& H);
double energy_variance(const StateVector& psi, const SpinOperator& H);
double energy_expectation(const StateVector& psi, const SpinOperator& H);

/// Eigenstate whose energy is closest to the spectral mean; ties go to the lowest index.
std::pair<Eigen::Index, StateVector> mid_spectrum_state(const SpectrumData& spectrum);

/// Same selection rule straight from a real Hamiltonian: all eigenvalues, then a
/// single eigenvector (much cheaper than a full decomposition at L = 12).
std::pair<Eigen::Index, StateVector> mid_spectrum_state(const DenseOperator& H);

/// Product state from a string of 'u'/'d' (or arrows); site 0 first.
StateVector product_state(std::string_view spins);

// ---------------------------------------------------------------------------
// Complete-basis variational solve on a finite ring.

/// Translation-orbit representatives of Pauli strings on an L-ring whose
/// cyclic support is at most k. Each entry is a length-L letter string.
struct RingBasis {
  int L = 0;
  int k = 0;
  std::vector<std::string> words;
};

RingBasis ring_basis(int L, int k, bool odd_y_only);

/// Cyclic support: the shortest arc covering all non-identity letters.
int ring_support(std::string_view ring_letters);

struct RingVagp {
  Eigen::VectorXd coeffs;  // against unit-normalized orbit sums
  DenseOperator agp;
  double residual = 0.0;   // per-site action ||dH + i[A, H]||^2 / (L 2^L)
};

/// Minimizes the action over the span of `basis` with dense traces and a
/// pseudo-inverse (cutoff 1e-10 of the largest gram eigenvalue).
RingVagp ring_vagp(const DenseOperator& H, const DenseOperator& dH, const RingBasis& basis);

/// Per-site normalized Frobenius inner product Tr(a† b) / (L 2^L).
Complex dense_inner(const DenseOperator& a, const DenseOperator& b);

}  // namespace vagp::exact
