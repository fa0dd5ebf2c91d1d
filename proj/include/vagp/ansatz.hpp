#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "vagp/pauli.hpp"

namespace vagp {

/// Ordered canonical k-body basis: every word has 1 <= support <= k and
/// non-identity ends. Ordering is by support, then lexicographic (I<X<Y<Z).
struct AnsatzBasis {
  int k = 0;
  bool parity_filter = true;  // keep only words with an odd number of Y letters
  std::vector<std::string> words;
  std::unordered_map<std::string, int> index;

  std::size_t size() const { return words.size(); }
  /// Position of `word`, or -1.
  int find(const std::string& word) const;
};

/// Throws std::invalid_argument for k < 1.
AnsatzBasis build_basis(int k, bool parity_filter = true);

/// Closed-form basis size: 3 + sum_{l=2..k} 9*4^(l-2) unfiltered; the odd-Y
/// count per support l >= 2 is (9*4^(l-2) - 2^(l-2)) / 2.
std::size_t basis_dimension(int k, bool parity_filter);

/// Shared, immutable basis instance for (k, parity_filter).
std::shared_ptr<const AnsatzBasis> cached_basis(int k, bool parity_filter = true);

using SparseComplex = Eigen::SparseMatrix<Complex>;
using SparseReal = Eigen::SparseMatrix<double>;

/// Linear system of the variational action S(c) = ||dH + sum_n c_n i[O_n, H]||^2.
///
/// `columns` holds i[O_n, H] expanded over `row_words` (support <= k + range(H) - 1),
/// so gram = Re(columns† columns) and rhs = -Re(columns† dH) = i<[O_n,H], dH>.
struct AdjointSystem {
  std::shared_ptr<const AnsatzBasis> basis;
  std::vector<std::string> row_words;
  SparseComplex columns;
  SparseReal gram;
  Eigen::VectorXd rhs;
  Eigen::VectorXcd dh;   // dH expanded over row_words
  double dh_norm_sq = 0;  // <dH, dH>, including words outside row_words

  Eigen::MatrixXd dense_gram() const { return Eigen::MatrixXd(gram); }
};

/// Builds the system with exact Pauli algebra for arbitrary Hermitian H and dH.
AdjointSystem assemble(std::shared_ptr<const AnsatzBasis> basis, const TransOp& H, const TransOp& dH,
                       int workers = 1);

/// Precomputed commutator columns of the basis with ZZ, Z and X, so the
/// system at any (h, g) is a sparse linear combination.
class IsingAdjoint {
 public:
  explicit IsingAdjoint(std::shared_ptr<const AnsatzBasis> basis, int workers = 1);

  const AnsatzBasis& basis() const { return *basis_; }
  std::shared_ptr<const AnsatzBasis> basis_ptr() const { return basis_; }
  const std::vector<std::string>& row_words() const { return row_words_; }

  /// i[O_n, ZZ + hZ + gX] over row_words().
  SparseComplex columns(double h, double g) const;

  /// Equivalent to assemble(basis, build_hamiltonian(h, g), dH).
  AdjointSystem system(double h, double g, const TransOp& dH) const;

  /// Row index of a word, or -1.
  int row_of(const std::string& word) const;

 private:
  std::shared_ptr<const AnsatzBasis> basis_;
  std::vector<std::string> row_words_;
  std::unordered_map<std::string, int> row_index_;
  SparseComplex zz_, z_, x_;
};

std::shared_ptr<const IsingAdjoint> cached_ising_adjoint(int k, bool parity_filter = true);

/// Expands an operator over a row-word list; words missing from the list are ignored.
Eigen::VectorXcd expand_over(const TransOp& op, const std::vector<std::string>& rows,
                             const std::unordered_map<std::string, int>& index);

}  // namespace vagp
