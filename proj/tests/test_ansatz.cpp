#include <cmath>

#include "doctest.h"
#include "vagp/ansatz.hpp"
#include "vagp/exact.hpp"

using namespace vagp;
using doctest::Approx;

TEST_SUITE("ansatz") {
  TEST_CASE("small bases") {
    const auto b1 = build_basis(1, true);
    REQUIRE(b1.size() == 1);
    CHECK(b1.words[0] == "Y");
    const auto b1f = build_basis(1, false);
    CHECK(b1f.words == std::vector<std::string>{"X", "Y", "Z"});
    CHECK(build_basis(2, false).size() == 12);
    CHECK(build_basis(2, true).words == std::vector<std::string>{"Y", "XY", "YX", "YZ", "ZY"});
    CHECK_THROWS_AS(build_basis(0), std::invalid_argument);
  }

  TEST_CASE("basis sizes match the closed form") {
    const std::size_t filtered[] = {1, 5, 22, 92, 376, 1520, 6112, 24512};
    for (int k = 1; k <= 8; ++k) {
      CAPTURE(k);
      CHECK(basis_dimension(k, true) == filtered[k - 1]);
      if (k <= 6) {
        CHECK(build_basis(k, true).size() == filtered[k - 1]);
        CHECK(build_basis(k, false).size() == basis_dimension(k, false));
      }
    }
    CHECK(basis_dimension(3, false) == 3 + 9 + 36);
  }

  TEST_CASE("ordering by support, then I < X < Y < Z, and index lookup") {
    const auto b = build_basis(3, true);
    for (std::size_t n = 1; n < b.size(); ++n) CHECK(WordOrder{}(b.words[n - 1], b.words[n]));
    CHECK(b.find("ZYZ") >= 0);
    CHECK(b.words[static_cast<std::size_t>(b.find("ZYZ"))] == "ZYZ");
    CHECK(b.find("ZZ") == -1);
    for (const auto& w : b.words) CHECK(is_canonical(w));
  }

  TEST_CASE("one-word system in closed form") {
    const auto basis = cached_basis(1, true);
    const double h = 0.8, g = 0.3;
    const auto sx = assemble(basis, build_hamiltonian(h, g), TransOp("X", 1));
    CHECK(sx.dense_gram()(0, 0) == Approx(4 * (h * h + g * g + 2)).epsilon(1e-14));
    CHECK(sx.rhs[0] == Approx(2 * h).epsilon(1e-14));
    const auto sz = assemble(basis, build_hamiltonian(h, g), TransOp("Z", 1));
    CHECK(sz.dense_gram()(0, 0) == Approx(4 * (h * h + g * g + 2)).epsilon(1e-14));
    CHECK(sz.rhs[0] == Approx(-2 * g).epsilon(1e-14));
    const auto s0 = assemble(basis, build_hamiltonian(0, 0), TransOp("X", 1));
    CHECK(s0.dense_gram()(0, 0) == Approx(8));
    CHECK(s0.rhs[0] == Approx(0).epsilon(1e-15));
  }

  TEST_CASE("gram entry against dense traces at L = 8") {
    const double h = 0.8, g = 0.3;
    const auto H = exact::materialize(build_hamiltonian(h, g), 8);
    const auto Y = exact::materialize(TransOp("Y", 1), 8);
    const auto X = exact::materialize(TransOp("X", 1), 8);
    exact::DenseOperator c{8, Complex(0, 1) * (Y.matrix * H.matrix - H.matrix * Y.matrix)};
    CHECK(exact::dense_inner(c, c).real() == Approx(4 * (h * h + g * g + 2)).epsilon(1e-12));
    CHECK(-exact::dense_inner(c, X).real() == Approx(2 * h).epsilon(1e-12));
  }

  TEST_CASE("Ising template agrees with generic assembly") {
    const auto adj = cached_ising_adjoint(3, true);
    const double h = 1.3, g = 0.45;
    const auto dH = TransOp::parse("0.6*Z + 0.8*X");
    const auto a = adj->system(h, g, dH);
    const auto b = assemble(cached_basis(3, true), build_hamiltonian(h, g), dH);
    CHECK((a.dense_gram() - b.dense_gram()).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((a.rhs - b.rhs).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(a.dh_norm_sq == Approx(1.0));
  }

  TEST_CASE("gram is positive semidefinite and bilinear in H") {
    for (double h : {0.0, 0.4, 2.0}) {
      for (double g : {0.0, 0.7}) {
        const auto s = cached_ising_adjoint(3, true)->system(h, g, TransOp("X", 1));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.dense_gram());
        CHECK(es.eigenvalues().minCoeff() > -1e-12);
      }
    }
    const auto basis = cached_basis(2, true);
    const auto H = build_hamiltonian(0.9, 0.4);
    const auto s1 = assemble(basis, H, TransOp("Z", 1));
    const auto s2 = assemble(basis, 2.0 * H, TransOp("Z", 1));
    CHECK((s2.dense_gram() - 4 * s1.dense_gram()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((s2.rhs - 2 * s1.rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
}
