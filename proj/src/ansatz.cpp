#include "vagp/ansatz.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

#include "vagp/parallel.hpp"

namespace vagp {

namespace {

constexpr Complex kI{0.0, 1.0};

using Triplet = Eigen::Triplet<Complex>;

// Assigns row indices in first-seen order while scanning columns in basis order.
struct RowIndexer {
  std::vector<std::string> words;
  std::unordered_map<std::string, int> index;

  int row(const std::string& w) {
    const auto [it, inserted] = index.try_emplace(w, static_cast<int>(words.size()));
    if (inserted) words.push_back(w);
    return it->second;
  }
};

std::vector<TransOp> commutator_columns(const AnsatzBasis& basis, const TransOp& H, int workers) {
  std::vector<TransOp> cols(basis.size());
  parallel_for(basis.size(), workers, [&](std::size_t n) {
    cols[n] = kI * trans_commutator(TransOp(basis.words[n], 1.0), H);
  });
  return cols;
}

SparseComplex to_sparse(const std::vector<TransOp>& cols, RowIndexer& rows, Eigen::Index nrows_hint = -1) {
  std::vector<Triplet> trips;
  for (std::size_t n = 0; n < cols.size(); ++n) {
    for (const auto& [w, c] : cols[n].terms()) trips.emplace_back(rows.row(w), static_cast<int>(n), c);
  }
  const Eigen::Index nrows = std::max<Eigen::Index>(nrows_hint, static_cast<Eigen::Index>(rows.words.size()));
  SparseComplex m(nrows, static_cast<Eigen::Index>(cols.size()));
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

AdjointSystem finish_system(std::shared_ptr<const AnsatzBasis> basis, std::vector<std::string> row_words,
                            const std::unordered_map<std::string, int>& row_index, SparseComplex columns,
                            const TransOp& dH) {
  AdjointSystem sys;
  sys.basis = std::move(basis);
  sys.dh = expand_over(dH, row_words, row_index);
  sys.row_words = std::move(row_words);
  sys.columns = std::move(columns);
  // Gram is symmetric; Eigen forms the product column by column.
  const SparseComplex vv = SparseComplex(sys.columns.adjoint()) * sys.columns;
  sys.gram = vv.real();
  sys.rhs = -(sys.columns.adjoint() * sys.dh).real();
  sys.dh_norm_sq = trans_inner(dH, dH).real();
  return sys;
}

}  // namespace

int AnsatzBasis::find(const std::string& word) const {
  const auto it = index.find(word);
  return it == index.end() ? -1 : it->second;
}

AnsatzBasis build_basis(int k, bool parity_filter) {
  if (k < 1) throw std::invalid_argument("ansatz support k must be >= 1, got " + std::to_string(k));
  if (k > 12) throw std::invalid_argument("ansatz support k > 12 is not supported");
  constexpr char letters[4] = {'I', 'X', 'Y', 'Z'};
  AnsatzBasis basis;
  basis.k = k;
  basis.parity_filter = parity_filter;
  for (int len = 1; len <= k; ++len) {
    std::string w(static_cast<std::size_t>(len), 'I');
    const std::uint64_t total = std::uint64_t{1} << (2 * len);
    for (std::uint64_t code = 0; code < total; ++code) {
      for (int j = 0; j < len; ++j) w[j] = letters[(code >> (2 * (len - 1 - j))) & 3];
      if (w.front() == 'I' || w.back() == 'I') continue;
      if (parity_filter && std::count(w.begin(), w.end(), 'Y') % 2 == 0) continue;
      basis.index.emplace(w, static_cast<int>(basis.words.size()));
      basis.words.push_back(w);
    }
  }
  return basis;
}

std::size_t basis_dimension(int k, bool parity_filter) {
  std::size_t n = parity_filter ? 1 : 3;
  for (int len = 2; len <= k; ++len) {
    const std::size_t all = 9 * (std::size_t{1} << (2 * (len - 2)));
    n += parity_filter ? (all - (std::size_t{1} << (len - 2))) / 2 : all;
  }
  return n;
}

std::shared_ptr<const AnsatzBasis> cached_basis(int k, bool parity_filter) {
  static std::mutex mutex;
  static std::map<std::pair<int, bool>, std::shared_ptr<const AnsatzBasis>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{k, parity_filter}];
  if (!slot) slot = std::make_shared<const AnsatzBasis>(build_basis(k, parity_filter));
  return slot;
}

Eigen::VectorXcd expand_over(const TransOp& op, const std::vector<std::string>& rows,
                             const std::unordered_map<std::string, int>& index) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(rows.size()));
  for (const auto& [w, c] : op.terms()) {
    const auto it = index.find(w);
    if (it != index.end()) v[it->second] = c;
  }
  return v;
}

AdjointSystem assemble(std::shared_ptr<const AnsatzBasis> basis, const TransOp& H, const TransOp& dH, int workers) {
  if (!basis) throw std::invalid_argument("null basis");
  RowIndexer rows;
  SparseComplex cols = to_sparse(commutator_columns(*basis, H, workers), rows);
  return finish_system(std::move(basis), std::move(rows.words), rows.index, std::move(cols), dH);
}

// ---------------------------------------------------------------------------

IsingAdjoint::IsingAdjoint(std::shared_ptr<const AnsatzBasis> basis, int workers) : basis_(std::move(basis)) {
  if (!basis_) throw std::invalid_argument("null basis");
  RowIndexer rows;
  const auto zz = commutator_columns(*basis_, TransOp("ZZ", 1.0), workers);
  const auto z = commutator_columns(*basis_, TransOp("Z", 1.0), workers);
  const auto x = commutator_columns(*basis_, TransOp("X", 1.0), workers);
  zz_ = to_sparse(zz, rows);
  z_ = to_sparse(z, rows);
  x_ = to_sparse(x, rows);
  const auto nrows = static_cast<Eigen::Index>(rows.words.size());
  zz_.conservativeResize(nrows, zz_.cols());
  z_.conservativeResize(nrows, z_.cols());
  x_.conservativeResize(nrows, x_.cols());
  row_words_ = std::move(rows.words);
  row_index_ = std::move(rows.index);
}

SparseComplex IsingAdjoint::columns(double h, double g) const {
  SparseComplex m = zz_;
  if (h != 0.0) m += Complex(h) * z_;
  if (g != 0.0) m += Complex(g) * x_;
  m.prune(Complex(0.0), kCoefficientCutoff);
  return m;
}

AdjointSystem IsingAdjoint::system(double h, double g, const TransOp& dH) const {
  return finish_system(basis_, row_words_, row_index_, columns(h, g), dH);
}

int IsingAdjoint::row_of(const std::string& word) const {
  const auto it = row_index_.find(word);
  return it == row_index_.end() ? -1 : it->second;
}

std::shared_ptr<const IsingAdjoint> cached_ising_adjoint(int k, bool parity_filter) {
  static std::mutex mutex;
  static std::map<std::pair<int, bool>, std::shared_ptr<const IsingAdjoint>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{k, parity_filter}];
  if (!slot) slot = std::make_shared<const IsingAdjoint>(cached_basis(k, parity_filter));
  return slot;
}

}  // namespace vagp
