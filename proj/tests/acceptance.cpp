// Acceptance harness: one PASS/FAIL line per criterion, details indented below.
// Usage: acceptance [criterion ...]   (default: all of 1-9)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <array>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "support.hpp"
#include "vagp/dynamics.hpp"
#include "vagp/exact.hpp"
#include "vagp/landscape.hpp"
#include "vagp/pert.hpp"
#include "vagp/vagp.hpp"

using namespace vagp;
constexpr double kPi = std::numbers::pi;

namespace {

struct Verdict {
  bool ok = true;
  void check(bool cond, const char* fmt, ...) __attribute__((format(printf, 3, 4)));
};

void Verdict::check(bool cond, const char* fmt, ...) {
  ok = ok && cond;
  std::printf("    [%s] ", cond ? "ok" : "x ");
  va_list args;
  va_start(args, fmt);
  std::vprintf(fmt, args);
  va_end(args);
  std::printf("\n");
  std::fflush(stdout);
}

void note(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void note(const char* fmt, ...) {
  std::printf("    [  ] ");
  va_list args;
  va_start(args, fmt);
  std::vprintf(fmt, args);
  va_end(args);
  std::printf("\n");
  std::fflush(stdout);
}

dynamics::CdConfig cd(int k) {
  dynamics::CdConfig c;
  c.k = k;
  return c;
}

bool within_rel(double v, double target, double rel) { return std::abs(v - target) <= rel * std::abs(target); }

// ---- 1: dark-state numbers ---------------------------------------------------

bool dark_state_numbers(Verdict& v) {
  const int L = 12;
  const dynamics::RampProtocol ramp{dynamics::RampKind::sin_square, 1.0, {2.0, 0.0}, {2.0, 0.5}};
  const auto lib = dynamics::dark_state_library(L);
  std::map<std::string, std::array<double, 2>> var;
  for (const auto& s : lib) {
    for (int i = 0; i < 2; ++i) {
      const int k = i == 0 ? 0 : 3;
      var[s.name][i] = dynamics::evolve(s.state, ramp, cd(k), L).final_variance;
    }
  }
  const auto& d = var["period4"];
  const auto& n = var["neel"];
  v.check(within_rel(d[0], 0.085, 0.10), "period-4 dark, unassisted: %.6g (target 0.085 +-10%%)", d[0]);
  v.check(d[1] >= 0.001 / 3 && d[1] <= 0.001 * 3, "period-4 dark, 3-body CD: %.6g (target 0.001 within x3)", d[1]);
  v.check(within_rel(n[0], 1.496, 0.05), "Neel, unassisted: %.6g (target 1.496 +-5%%)", n[0]);
  v.check(within_rel(n[1], 1.468, 0.05), "Neel, 3-body CD: %.6g (target 1.468 +-5%%)", n[1]);
  note("dark/bright separation (unassisted dark <= bright/20): %.6g vs %.6g -> %s", d[0], n[0] / 20,
       d[0] <= n[0] / 20 ? "holds" : "violated");
  const auto& nd = var["nonsymmetric_dark"];
  const auto& nb = var["nonsymmetric_bright"];
  note("non-symmetric pair: dark %.6g / %.6g, bright %.6g / %.6g (unassisted / 3-body)", nd[0], nd[1], nb[0], nb[1]);
  return v.ok;
}

// ---- 2: perturbative oracle --------------------------------------------------

double coefficient_error(const VagpSolution& sol, const TransOp& oracle) {
  const TransOp var = sol.as_operator();
  double scale = 0, worst = 0;
  for (const auto& [w, c] : oracle.terms()) scale = std::max(scale, std::abs(c));
  const TransOp words = var + oracle;
  for (const auto& [w, unused] : words.terms()) worst = std::max(worst, std::abs(var.coeff(w) - oracle.coeff(w)));
  return worst / scale;
}

TransOp terms(std::initializer_list<std::pair<const char*, double>> list) {
  TransOp op;
  for (const auto& [w, c] : list) op.add(w, c);
  return op;
}

bool perturbative_oracle(Verdict& v) {
  const double g = 1e-3;
  for (double h : {0.5, 1.0, 1.5, 3.0}) {
    const auto pair = solve_pair({h, g}, 3);
    const double eg = coefficient_error(pair.at(kPi / 2), pert::a_g0(h));
    const double eh = coefficient_error(pair.at(0.0), g * pert::a_h1(h));
    v.check(eg < 1e-2 && eh < 1e-2, "h=%.1f: transverse rel err %.3g, longitudinal rel err %.3g (< 1e-2)", h, eg, eh);
  }
  const std::vector<std::pair<double, TransOp>> special{
      {0.0, terms({{"YZ", 1.0 / 8}, {"ZY", 1.0 / 8}})},
      {1.0, terms({{"Y", 1.0 / 6}, {"YZ", 1.0 / 6}, {"ZY", 1.0 / 6}, {"ZYZ", -1.0 / 3}})},
      {2.0, terms({{"Y", 5.0 / 32}, {"YZ", 1.0 / 32}, {"ZY", 1.0 / 32}, {"ZYZ", -3.0 / 32}})}};
  for (const auto& [h, expected] : special) {
    const double d = pert::a_g0(h).max_abs_diff(expected);
    v.check(d < 1e-15, "special transverse branch at h=%.0f: max deviation %.3g", h, d);
  }
  const auto a1 = pert::a_h1(1.0);
  const double d1 = a1.max_abs_diff(terms({{"Y", -7.0 / 18}, {"YZ", 1.0 / 9}, {"ZY", 1.0 / 9}, {"ZYZ", 1.0 / 9}}));
  v.check(d1 < 1e-15, "longitudinal value at h=1: max deviation %.3g", d1);
  bool threw = true;
  for (double h : {0.0, 2.0}) {
    try {
      pert::a_h1(h);
      threw = false;
    } catch (const std::domain_error&) {
    }
  }
  v.check(threw && pert::a_h1_divergence(0) && pert::a_h1_divergence(2),
          "longitudinal branch diverges at h=0 and h=2 and reports its residue");
  return v.ok;
}

// ---- 3: norm scaling ---------------------------------------------------------

bool norm_scaling(Verdict& v) {
  const double theta = std::atan(0.2);
  const auto scan = landscape::norm_scan(theta, landscape::logspace(0.01, 0.4, 25), 3);
  v.check(std::abs(scan.exponent_orth + 1.0) <= 0.1, "orthogonal norm exponent %.4f (target -1.0 +- 0.1)",
          scan.exponent_orth);
  v.check(scan.opt_variation < 0.2, "optimal norm variation %.4f (< 0.2)", scan.opt_variation);

  // Per-combination |c|^2 exponents on the small-r window.
  const auto radii = landscape::logspace(0.01, 0.05, 9);
  for (bool optimal : {false, true}) {
    const auto cs = landscape::coefficient_scan(theta, radii, 3, optimal);
    const char* dir = optimal ? "optimal" : "orthogonal";
    std::vector<std::string> zero = optimal ? std::vector<std::string>{"YZ+ZY"}
                                            : std::vector<std::string>{"XY+YX", "YZ+ZY"};
    const std::string lead = optimal ? "YZ+ZY" : "Y-ZYZ";
    const auto top = std::max_element(cs.series.begin(), cs.series.end(),
                                      [](const auto& a, const auto& b) { return a.weight[0] < b.weight[0]; });
    v.check(top->label == lead, "%s direction dominated by %s at r=%.2f (largest: %s)", dir, lead.c_str(), radii[0],
            top->label.c_str());
    for (const auto& s : cs.series) {
      if (s.vanishing) continue;
      const bool is_zero = std::find(zero.begin(), zero.end(), s.label) != zero.end();
      if (!optimal && s.label == "Y-ZYZ") {
        v.check(std::abs(s.exponent + 2) < 0.15, "%s %s exponent %.3f (target -2)", dir, s.label.c_str(), s.exponent);
      } else if (is_zero) {
        v.check(std::abs(s.exponent) < 0.15, "%s %s exponent %.3f (r-independent, target 0)", dir, s.label.c_str(),
                s.exponent);
      } else {
        const double nearest = std::max(1.0, std::round(s.exponent));
        v.check(std::abs(s.exponent - nearest) < 0.15, "%s %s exponent %.3f (positive integer)", dir,
                s.label.c_str(), s.exponent);
      }
    }
  }
  return v.ok;
}

// ---- 4: perturbative angle ---------------------------------------------------

bool perturbative_angle(Verdict& v) {
  for (double h : {0.5, 1.0, 1.5}) {
    for (double g : {0.01, 0.02, 0.05}) {
      const double var = optimal_angle({h, g}, 3).phi_opt;
      const double pt = pert::perturbative_optimal_angle(h, g);
      const double rel = std::abs(var - pt) / std::abs(pt);
      v.check(rel < 0.15, "(%.2f, %.2f): variational %.5f, perturbative %.5f, rel %.3g", h, g, var, pt, rel);
    }
  }
  return v.ok;
}

// ---- 5: flow topology --------------------------------------------------------

bool flow_topology(Verdict& v) {
  const landscape::Domain plane{-3, 3, -2, 2};
  const int seeds = 16;
  for (CouplingPoint c : {CouplingPoint{0, 0}, CouplingPoint{2, 0}}) {
    int captured = 0;
    for (int i = 0; i < seeds; ++i) {
      const double a = (i + 0.5) * 2 * kPi / seeds;
      const CouplingPoint s{c.h + 0.3 * std::cos(a), c.g + 0.3 * std::sin(a)};
      const auto line = landscape::integrate_streamline(3, plane, s, {c.h - s.h, c.g - s.g});
      if (line.reason == landscape::Termination::singularity_proximity && line.singularity &&
          line.singularity->h == c.h && line.singularity->g == c.g)
        ++captured;
    }
    v.check(captured == seeds, "k=3 ring r=0.3 around (%.0f, 0): %d/%d streamlines end at the singularity", c.h,
            captured, seeds);
  }
  const double g = 0.05;
  auto horizontal = [](double phi) { return std::abs(phi) < kPi / 8; };
  auto vertical = [](double phi) { return std::abs(phi) > 3 * kPi / 8; };
  bool k3_flat = true;
  for (double h : {0.9, 0.95, 1.0, 1.05, 1.1}) {
    const double phi = optimal_angle({h, g}, 3).phi_opt;
    k3_flat = k3_flat && horizontal(phi);
    note("k=3 phi_opt(%.2f, %.2f) = %.4f", h, g, phi);
  }
  v.check(k3_flat, "k=3 field near-horizontal across h in [0.9, 1.1] at g=0.05");
  const double p09 = optimal_angle({0.9, g}, 5).phi_opt;
  const double p10 = optimal_angle({1.0, g}, 5).phi_opt;
  const double p11 = optimal_angle({1.1, g}, 5).phi_opt;
  v.check(horizontal(p09) && vertical(p10) && horizontal(p11),
          "k=5 phi_opt at h=0.9, 1.0, 1.1 (g=0.05): %.4f, %.4f, %.4f (horizontal -> vertical -> horizontal)", p09,
          p10, p11);
  return v.ok;
}

// ---- 6: exact limit ----------------------------------------------------------

bool exact_limit(Verdict& v) {
  const int L = 6;
  const auto H = exact::materialize(build_hamiltonian(0.5, 0.5), L);
  const auto sp = exact::diagonalize(H);
  const double tol = exact::default_degeneracy_tol(sp);
  for (const char* dir : {"Z", "X"}) {
    const auto dH = exact::materialize(TransOp(dir, 1.0), L);
    const auto rv = exact::ring_vagp(H, dH, exact::ring_basis(L, L, true));
    const auto A = exact::exact_agp(sp, dH);
    const Eigen::MatrixXcd a = sp.vectors.adjoint() * rv.agp.matrix * sp.vectors;
    const Eigen::MatrixXcd b = sp.vectors.adjoint() * A.matrix * sp.vectors;
    double worst = 0;
    for (Eigen::Index m = 0; m < a.rows(); ++m)
      for (Eigen::Index n = 0; n < a.cols(); ++n)
        if (std::abs(sp.energies[m] - sp.energies[n]) > tol) worst = std::max(worst, std::abs(a(m, n) - b(m, n)));
    v.check(worst < 1e-8, "dH=%s: complete-basis VAGP vs exact AGP on non-degenerate pairs, max diff %.3g", dir, worst);
  }
  const auto s0 = exact::diagonalize(exact::materialize(build_hamiltonian(1.0, 0.3), L));
  const auto res = dynamics::dress(exact::StateVector(s0.vectors.col(0)), {1.0, 0.3}, {0.5, 0.5}, L);
  v.check(res.final_variance < 1e-10, "exact dressing (1, 0.3) -> (0.5, 0.5): final variance %.3g", res.final_variance);
  return v.ok;
}

// ---- 7: protocol hierarchy ---------------------------------------------------

bool protocol_hierarchy(Verdict& v) {
  const double e = 1e-2;
  const std::vector<std::pair<CouplingPoint, CouplingPoint>> paths{
      {{e, e}, {0.5, 0.5}}, {{1 - e, e}, {0.5, 0.5}}, {{e, 1 - e}, {0.5, 0.5}}};
  const std::vector<double> rates{0.5, 0.2, 0.1, 0.07, 0.05, 0.035, 0.02, 0.01};
  std::vector<std::vector<double>> var(paths.size());
  for (std::size_t p = 0; p < paths.size(); ++p) {
    for (double r : rates) {
      const auto row = dynamics::sweep_rate({paths[p]}, {r}, 12, cd(0), dynamics::RampKind::linear);
      var[p].push_back(row[0].final_variance);
      note("path %zu (%.2f, %.2f) rate %.3f: %.6g", p, paths[p].first.h, paths[p].first.g, r, var[p].back());
    }
  }
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const double r1 = var[1][i] / var[0][i], r2 = var[2][i] / var[0][i];
    v.check(r1 >= 10 && r2 >= 10, "rate %.3f: orthogonal/optimal ratios %.3g and %.3g (>= 10)", rates[i], r1, r2);
  }
  // Rates are listed in decreasing order: the variance must not fall as the ramp slows.
  bool plateau = true;
  for (std::size_t i = 0; i + 1 < rates.size(); ++i) {
    if (rates[i] > 0.1 + 1e-12) continue;
    plateau = plateau && var[1][i + 1] >= var[1][i];
  }
  v.check(plateau, "(1-eps, eps) path: variance non-decreasing as 1/T goes from 0.1 down to 0.01");
  note("(1-eps, eps) path endpoints: %.6g at 1/T=0.1, %.6g at 1/T=0.01", var[1][2], var[1].back());
  return v.ok;
}

// ---- 8: decay-rate structure -------------------------------------------------

bool gamma_structure(Verdict& v) {
  const std::vector<int> ks{3, 5, 7};
  const auto gs = landscape::linspace(0.05, 2.0, 40);
  std::vector<CouplingPoint> pts;
  for (double g : gs) pts.push_back({0.15, g});
  const auto rows = landscape::gamma_sweep(pts, gs, ks);
  const std::size_t n = gs.size();
  for (std::size_t j = 0; j < ks.size(); ++j) {
    auto first = rows.begin() + static_cast<long>(j * n);
    const auto best = std::max_element(first, first + static_cast<long>(n),
                                       [](const auto& a, const auto& b) { return a.gamma < b.gamma; });
    v.check(best->coupling > 0.8 && best->coupling < 1.2, "h=0.15: k=%d argmax_g Gamma = %.3f (in (0.8, 1.2))",
            ks[j], best->coupling);
  }
  int ordered = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (rows[i].gamma > rows[n + i].gamma && rows[n + i].gamma > rows[2 * n + i].gamma) ++ordered;
  v.check(ordered >= 0.95 * n, "Gamma decreasing in k at %d/%zu points (>= 95%%)", ordered, n);

  const auto hs = landscape::linspace(1.8, 2.2, 21);
  std::vector<CouplingPoint> cut;
  for (double h : hs) cut.push_back({h, 0.2});
  const auto crows = landscape::gamma_sweep(cut, hs, {3, 7});
  double p3 = 0, p7 = 0;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    p3 = std::max(p3, crows[i].gamma);
    p7 = std::max(p7, crows[hs.size() + i].gamma);
  }
  v.check(p3 >= 3 * p7, "g=0.2 cut, h in [1.8, 2.2]: peak k=3 %.4g, k=7 %.4g, ratio %.3g (>= 3)", p3, p7, p3 / p7);
  return v.ok;
}

// ---- 9: algebra properties ---------------------------------------------------

bool algebra_properties(Verdict& v) {
  auto report = [&](const char* name, const testing::PropertyReport& r) {
    v.check(r.ok() && r.trials == 100, "%s: %d/%d instances pass, worst error %.3g", name, r.trials - r.failures,
            r.trials, r.worst);
  };
  report("anti-commutativity", testing::check_anticommutativity(100, 901));
  report("Jacobi identity", testing::check_jacobi(100, 902));
  report("dense equivalence (L=8)", testing::check_dense_equivalence(100, 903));
  report("Hermiticity closure", testing::check_hermiticity_closure(100, 904));
  report("even-Y coefficients vanish", testing::check_even_y_vanishing(100, 905));
  return v.ok;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<bool(Verdict&)>>> criteria{
      {"dark-state variances at L=12", dark_state_numbers},
      {"perturbative oracle equivalence", perturbative_oracle},
      {"norm scaling along g = 0.2 h", norm_scaling},
      {"perturbative vs variational optimal angle", perturbative_angle},
      {"flow topology", flow_topology},
      {"exact-limit equivalence at L=6", exact_limit},
      {"protocol hierarchy at L=12", protocol_hierarchy},
      {"decay-rate structure", gamma_structure},
      {"algebra property suite", algebra_properties},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int c = std::atoi(argv[i]);
    if (c < 1 || c > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion '%s' (expected 1-%zu)\n", argv[i], criteria.size());
      return 2;
    }
    selected.push_back(c);
  }
  if (selected.empty())
    for (int c = 1; c <= static_cast<int>(criteria.size()); ++c) selected.push_back(c);

  int failed = 0;
  for (int c : selected) {
    const auto& [name, run] = criteria[static_cast<std::size_t>(c - 1)];
    std::printf("criterion %d: %s\n", c, name);
    std::fflush(stdout);
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    bool ok = false;
    try {
      ok = run(v);
    } catch (const std::exception& e) {
      std::printf("    [x ] error: %s\n", e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %d %s (%.1f s)\n", ok ? "PASS" : "FAIL", c, name, secs);
    std::fflush(stdout);
    failed += ok ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
