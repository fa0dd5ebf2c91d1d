#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "vagp/exact.hpp"
#include "vagp/pauli.hpp"
#include "vagp/vagp.hpp"

namespace testing {

// Seeded source for hand-rolled generators; every draw is reproducible.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }

  // Canonical word: non-identity ends, identity allowed inside.
  std::string word(int max_support) {
    const int s = integer(1, max_support);
    std::string w(static_cast<std::size_t>(s), 'I');
    for (int i = 0; i < s; ++i) {
      const bool end = i == 0 || i == s - 1;
      w[static_cast<std::size_t>(i)] = "IXYZ"[end ? integer(1, 3) : integer(0, 3)];
    }
    return w;
  }

  vagp::TransOp op(int max_terms, int max_support, bool hermitian) {
    vagp::TransOp out;
    const int n = integer(1, max_terms);
    for (int i = 0; i < n; ++i) {
      const vagp::Complex c = hermitian ? vagp::Complex(uniform(-1, 1), 0) : vagp::Complex(uniform(-1, 1), uniform(-1, 1));
      out.add(word(max_support), c);
    }
    return out;
  }

  vagp::CouplingPoint point(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi)}; }

 private:
  std::mt19937_64 rng_;
};

struct PropertyReport {
  int trials = 0;
  int failures = 0;
  double worst = 0.0;

  bool ok() const { return failures == 0; }
  void record(double err, double tol) {
    ++trials;
    worst = std::max(worst, err);
    if (!(err <= tol)) ++failures;
  }
};

inline PropertyReport check_anticommutativity(int trials, std::uint64_t seed) {
  Gen gen(seed);
  PropertyReport rep;
  for (int t = 0; t < trials; ++t) {
    const auto a = gen.op(4, 4, false), b = gen.op(4, 4, false);
    rep.record(vagp::trans_commutator(a, b).max_abs_diff(-1.0 * vagp::trans_commutator(b, a)), 1e-13);
  }
  return rep;
}

inline PropertyReport check_jacobi(int trials, std::uint64_t seed) {
  Gen gen(seed);
  PropertyReport rep;
  using vagp::trans_commutator;
  for (int t = 0; t < trials; ++t) {
    const auto a = gen.op(3, 3, false), b = gen.op(3, 3, false), c = gen.op(3, 3, false);
    vagp::TransOp sum = trans_commutator(a, trans_commutator(b, c));
    sum += trans_commutator(b, trans_commutator(c, a));
    sum += trans_commutator(c, trans_commutator(a, b));
    rep.record(sum.max_abs_diff(vagp::TransOp{}), 1e-12);
  }
  return rep;
}

// Commutators and inner products against dense matrices on an 8-site ring;
// supports stay below 8 so nothing wraps.
inline PropertyReport check_dense_equivalence(int trials, std::uint64_t seed) {
  Gen gen(seed);
  PropertyReport rep;
  constexpr int L = 8;
  for (int t = 0; t < trials; ++t) {
    const auto a = gen.op(3, 3, false), b = gen.op(3, 3, false);
    const auto da = vagp::exact::materialize(a, L), db = vagp::exact::materialize(b, L);
    const auto dc = vagp::exact::materialize(vagp::trans_commutator(a, b), L);
    const Eigen::MatrixXcd direct = da.matrix * db.matrix - db.matrix * da.matrix;
    double err = (dc.matrix - direct).cwiseAbs().maxCoeff();
    err = std::max(err, std::abs(vagp::trans_inner(a, b) - vagp::exact::dense_inner(da, db)));
    rep.record(err, 1e-12);
  }
  return rep;
}

inline PropertyReport check_hermiticity_closure(int trials, std::uint64_t seed) {
  Gen gen(seed);
  PropertyReport rep;
  for (int t = 0; t < trials; ++t) {
    const auto a = gen.op(4, 4, true), b = gen.op(4, 4, true);
    const auto c = vagp::Complex(0, 1) * vagp::trans_commutator(a, b);
    rep.record(c.is_hermitian(1e-13) ? 0.0 : 1.0, 0.5);
  }
  return rep;
}

// Without the parity filter, the minimizer must still put zero weight on even-Y words.
inline PropertyReport check_even_y_vanishing(int trials, std::uint64_t seed) {
  Gen gen(seed);
  PropertyReport rep;
  vagp::SolverOptions opts;
  opts.parity_filter = false;
  for (int t = 0; t < trials; ++t) {
    const auto p = gen.point(-2.5, 2.5);
    const double phi = gen.uniform(-M_PI / 2, M_PI / 2);
    const int k = gen.integer(1, 3);
    const auto sol = vagp::solve(p, phi, k, opts);
    double worst = 0.0, scale = 1e-300;
    for (std::size_t n = 0; n < sol.basis->size(); ++n) {
      const double c = std::abs(sol.coeffs[static_cast<Eigen::Index>(n)]);
      scale = std::max(scale, c);
      int ys = 0;
      for (char ch : sol.basis->words[n]) ys += ch == 'Y';
      if (ys % 2 == 0) worst = std::max(worst, c);
    }
    rep.record(worst / std::max(scale, 1.0), 1e-10);
  }
  return rep;
}

}  // namespace testing
