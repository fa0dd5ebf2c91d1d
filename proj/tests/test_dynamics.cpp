#include <cmath>

#include "doctest.h"
#include "vagp/dynamics.hpp"

using namespace vagp;
using namespace vagp::dynamics;
using doctest::Approx;

namespace {
CdConfig cd(int k) {
  CdConfig c;
  c.k = k;
  return c;
}

StateVector mid_state(CouplingPoint p, int L) {
  return exact::mid_spectrum_state(exact::materialize(build_hamiltonian(p.h, p.g), L)).second;
}
}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("ramp schedules") {
    for (auto kind : {RampKind::sin_square, RampKind::linear}) {
      RampProtocol r{kind, 2.5, {0.1, 0.2}, {0.5, 0.9}};
      CHECK(r.lambda(0) == Approx(0).epsilon(1e-15));
      CHECK(r.lambda(2.5) == Approx(1).epsilon(1e-15));
      CHECK(r.lambda(1.25) == Approx(0.5).epsilon(1e-14));
      CHECK(r.at(1).h == Approx(0.5));
      CHECK(r.at(1).g == Approx(0.9));
      CHECK(r.at(0).g == Approx(0.2));
      // lambda_dot against a central difference
      const double t = 0.7, e = 1e-6;
      CHECK(r.lambda_dot(t) == Approx((r.lambda(t + e) - r.lambda(t - e)) / (2 * e)).epsilon(1e-7));
    }
    RampProtocol s{RampKind::sin_square, 3.0, {}, {}};
    CHECK(std::abs(s.lambda_dot(0)) < 1e-14);
    CHECK(std::abs(s.lambda_dot(3.0)) < 1e-14);
    CHECK(parse_ramp("sin2") == RampKind::sin_square);
    CHECK(parse_ramp("linear") == RampKind::linear);
    CHECK_THROWS_AS(parse_ramp("cubic"), std::invalid_argument);
    CHECK(to_string(RampKind::sin_square) == "sin_square");
  }

  TEST_CASE("chain operator matches the dense Hamiltonian") {
    const int L = 6;
    IsingChain chain(L);
    const CouplingPoint p{0.8, 0.45};
    const auto dense = exact::materialize(build_hamiltonian(p.h, p.g), L);
    StateVector psi = StateVector::Zero(64);
    for (Eigen::Index i = 0; i < 64; ++i) psi[i] = Complex(std::sin(1.0 + i), std::cos(3.0 * i));
    psi.normalize();
    StateVector out(64);
    chain.apply(p, psi, out);
    CHECK((out - dense.matrix * psi).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(chain.variance(p, psi) == Approx(exact::energy_variance(psi, dense)).epsilon(1e-12));
    const double emax = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(dense.matrix).eigenvalues().cwiseAbs().maxCoeff();
    CHECK(chain.bound(p) >= emax);
  }

  TEST_CASE("constant path keeps an eigenstate stationary") {
    const int L = 6;
    const CouplingPoint p{0.6, 0.7};
    const auto sp = exact::diagonalize(exact::materialize(build_hamiltonian(p.h, p.g), L));
    const StateVector psi = sp.vectors.col(10);
    for (int k : {0, 3}) {
      const auto res = evolve(psi, {RampKind::sin_square, 2.0, p, p}, cd(k), L);
      for (const auto& tp : res.trace) CHECK(tp.variance < 1e-10);
      CHECK(std::abs(res.final_state.norm() - 1) < 1e-10);
    }
  }

  TEST_CASE("k = 0 and k = 1 give the same evolution") {
    // The one-body coefficient goes as h sin(phi) - g cos(phi): zero on a radial path.
    const int L = 8;
    const CouplingPoint a{0.01, 0.01}, b{0.5, 0.5};
    const auto psi = mid_state(a, L);
    const RampProtocol ramp{RampKind::linear, 2.0, a, b};
    const auto r0 = evolve(psi, ramp, cd(0), L);
    const auto r1 = evolve(psi, ramp, cd(1), L);
    CHECK(r0.final_variance == Approx(r1.final_variance).epsilon(1e-12));
  }

  TEST_CASE("variance falls with k on the radial path") {
    const int L = 10;
    const CouplingPoint a{0.01, 0.01}, b{0.5, 0.5};
    const auto psi = mid_state(a, L);
    const RampProtocol ramp{RampKind::linear, 2.0, a, b};
    double prev = 1e300;
    for (int k = 0; k <= 3; ++k) {
      const double v = evolve(psi, ramp, cd(k), L).final_variance;
      CHECK(v <= prev * (1 + 1e-12));
      prev = v;
    }
  }

  TEST_CASE("step halving") {
    const int L = 8;
    const CouplingPoint a{2, 0}, b{2, 0.5};
    const auto lib = dark_state_library(L);
    for (int k : {0, 3}) {
      const RampProtocol ramp{RampKind::sin_square, 1.0, a, b};
      const auto coarse = evolve(lib[1].state, ramp, cd(k), L);
      EvolveOptions half;
      half.dt = coarse.dt / 2;
      const auto fine = evolve(lib[1].state, ramp, cd(k), L, half);
      CHECK(std::abs(coarse.final_variance - fine.final_variance) < 1e-6);
      CHECK(coarse.norm_drift < 1e-8);
    }
  }

  TEST_CASE("grid interpolation against per-step solves") {
    const int L = 6;
    const RampProtocol ramp{RampKind::sin_square, 1.0, {2, 0.05}, {2, 0.5}};
    const auto psi = exact::product_state("uudduu");
    CdConfig grid = cd(3);
    CdConfig each = cd(3);
    each.resolve_each_step = true;
    EvolveOptions opts;
    opts.dt = 2e-3;
    const double vg = evolve(psi, ramp, grid, L, opts).final_variance;
    const double ve = evolve(psi, ramp, each, L, opts).final_variance;
    CHECK(std::abs(vg - ve) < 1e-3 * std::max(1.0, ve));
  }

  TEST_CASE("fast ramp approaches the sudden quench") {
    const int L = 8;
    const CouplingPoint a{0.01, 0.01}, b{0.5, 0.5};
    const auto psi = mid_state(a, L);
    const double q = quench_variance(psi, b, L);
    const double v = evolve(psi, {RampKind::linear, 1e-3, a, b}, cd(0), L).final_variance;
    CHECK(v == Approx(q).epsilon(1e-3));
    const auto sweep = sweep_rate({{a, b}}, {1000.0}, L, cd(0), RampKind::linear);
    REQUIRE(sweep.size() == 1);
    CHECK(sweep[0].final_variance == Approx(q).epsilon(1e-3));
    CHECK_THROWS_AS(sweep_rate({{a, b}}, {0.0}, L, cd(0), RampKind::linear), std::invalid_argument);
  }

  TEST_CASE("exact dressing transports eigenstates") {
    const int L = 6;
    const auto s0 = exact::diagonalize(exact::materialize(build_hamiltonian(1.0, 0.3), L));
    const StateVector psi = s0.vectors.col(0);
    const auto res = dress(psi, {1.0, 0.3}, {0.5, 0.5}, L);
    CHECK(res.final_variance < 1e-10);
    const auto s1 = exact::diagonalize(exact::materialize(build_hamiltonian(0.5, 0.5), L));
    CHECK(std::abs(s1.vectors.col(0).dot(res.final_state)) == Approx(1).epsilon(1e-8));
  }

  TEST_CASE("variational dressing improves on no dressing") {
    const int L = 6;
    const auto s0 = exact::diagonalize(exact::materialize(build_hamiltonian(1.0, 0.3), L));
    const StateVector psi = s0.vectors.col(0);
    DressingConfig cfg;
    cfg.exact_agp = false;
    cfg.k = 3;
    const auto res = dress(psi, {1.0, 0.3}, {0.5, 0.5}, L, cfg);
    CHECK(res.final_variance < quench_variance(psi, {0.5, 0.5}, L));
  }

  TEST_CASE("dark-state library") {
    const auto lib = dark_state_library(12);
    REQUIRE(lib.size() == 4);
    CHECK(lib[0].spins == "uudduudduudd");
    CHECK(lib[0].dark);
    CHECK(lib[1].spins == "udududududud");
    CHECK_FALSE(lib[1].dark);
    CHECK(lib[2].spins == "duuduuuduuuu");
    CHECK(lib[2].dark);
    CHECK(lib[3].spins == "duududduuddd");
    CHECK_FALSE(lib[3].dark);
    CHECK(dark_state_library(8).size() == 2);
    CHECK_THROWS_AS(dark_state_library(3), std::invalid_argument);
  }

  TEST_CASE("input validation") {
    const int L = 6;
    StateVector psi = exact::product_state("uuuuuu");
    const RampProtocol ramp{RampKind::linear, 1.0, {1, 0.1}, {1, 0.2}};
    CHECK_THROWS_AS(evolve(2.0 * psi, ramp, cd(0), L), std::invalid_argument);
    CHECK_THROWS_AS(evolve(psi, {RampKind::linear, 0.0, {}, {}}, cd(0), L), std::invalid_argument);
    CHECK_THROWS_AS(evolve(psi, ramp, cd(7), L), std::invalid_argument);
    CdConfig bad = cd(3);
    bad.grid_points = 1;
    CHECK_THROWS_AS(evolve(psi, ramp, bad, L), std::invalid_argument);
    CHECK_THROWS_AS(evolve(psi, ramp, cd(0), 7), std::invalid_argument);
  }
}
