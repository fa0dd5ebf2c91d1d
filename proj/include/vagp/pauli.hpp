#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>

namespace vagp {

using Complex = std::complex<double>;

/// Coefficients with magnitude below this are dropped after arithmetic.
inline constexpr double kCoefficientCutoff = 1e-14;

/// Orders canonical letter strings by support, then lexicographically (I < X < Y < Z).
struct WordOrder {
  bool operator()(const std::string& a, const std::string& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

/// A Pauli string on consecutive sites with a scalar prefactor.
///
/// Letters are stored as the characters 'I', 'X', 'Y', 'Z'. A canonical word
/// has non-identity letters at both ends; the identity is the empty string.
struct PauliWord {
  std::string letters;
  Complex phase{1.0, 0.0};

  PauliWord() = default;
  explicit PauliWord(std::string l, Complex p = 1.0);

  int support() const { return static_cast<int>(letters.size()); }
  bool is_identity() const { return letters.empty(); }
  int y_count() const;

  /// Strips identity letters from both ends.
  void canonicalize();
};

/// True when `letters` is a valid canonical word (alphabet IXYZ, anchored ends).
bool is_canonical(std::string_view letters);

/// Product a · (b shifted right by `offset` sites), re-canonicalized.
PauliWord word_product(const PauliWord& a, const PauliWord& b, int offset);

/// Translation-invariant, zero-momentum operator: a linear combination of
/// translation sums of canonical Pauli words on an infinite chain.
class TransOp {
 public:
  using Terms = std::map<std::string, Complex, WordOrder>;

  TransOp() = default;
  TransOp(std::string_view word, Complex coeff);

  /// Parses a compact sum such as "ZZ + 0.5*Z - X"; coefficients must be real.
  static TransOp parse(std::string_view expr);

  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  Complex coeff(const std::string& word) const;
  int max_support() const;

  /// Adds `c` to the coefficient of `word` (canonicalized; phase-free letters).
  void add(std::string word, Complex c);

  /// Drops coefficients with |c| < cutoff.
  TransOp& prune(double cutoff = kCoefficientCutoff);

  TransOp& operator+=(const TransOp& other);
  TransOp& operator-=(const TransOp& other);
  TransOp& operator*=(Complex s);

  /// Hermitian conjugate: Pauli strings are Hermitian, so coefficients are conjugated.
  TransOp adjoint() const;

  bool is_hermitian(double tol = 1e-12) const;

  /// Largest |coefficient| difference against another operator (union of words).
  double max_abs_diff(const TransOp& other) const;

 private:
  Terms terms_;
};

TransOp operator+(TransOp a, const TransOp& b);
TransOp operator-(TransOp a, const TransOp& b);
TransOp operator*(Complex s, TransOp a);
TransOp operator*(TransOp a, Complex s);

/// Exact zero-momentum commutator [a, b] of translation sums.
TransOp trans_commutator(const TransOp& a, const TransOp& b);

/// Per-site normalized Frobenius inner product Tr(a† b) / (L 2^L).
Complex trans_inner(const TransOp& a, const TransOp& b);

/// ZZ + h Z + g X with the Ising coupling fixed to one.
TransOp build_hamiltonian(double h, double g);

}  // namespace vagp
