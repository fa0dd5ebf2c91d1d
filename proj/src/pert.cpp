#include "vagp/pert.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace vagp::pert {

namespace {

bool near(double h, double target) { return std::abs(h - target) < kSpecialPointTol; }

// Builds sum_i c_i * (sum of listed words).
TransOp combo(std::initializer_list<std::pair<double, std::initializer_list<const char*>>> parts) {
  TransOp out;
  for (const auto& [c, words] : parts) {
    for (const char* w : words) out.add(w, c);
  }
  return out.prune();
}

}  // namespace

TransOp a_g0(double h) {
  if (near(h, 0.0)) return combo({{1.0 / 8, {"YZ", "ZY"}}});
  if (near(h, 2.0)) return combo({{5.0 / 32, {"Y"}}, {1.0 / 32, {"YZ", "ZY"}}, {-3.0 / 32, {"ZYZ"}}});
  if (near(h, -2.0)) return combo({{-5.0 / 32, {"Y"}}, {1.0 / 32, {"YZ", "ZY"}}, {3.0 / 32, {"ZYZ"}}});
  const double d = 4 - h * h;
  return combo({{(2 - h * h) / (2 * h * d), {"Y"}}, {1 / (2 * d), {"YZ", "ZY"}}, {-1 / (h * d), {"ZYZ"}}});
}

TransOp a_h1(double h) {
  if (near(h, 0.0) || near(std::abs(h), 2.0))
    throw std::domain_error("a_h1 diverges at h = " + std::to_string(h) + "; use a_h1_divergence");
  const double h2 = h * h;
  const double d2 = (h2 - 4) * (h2 - 4);
  return combo({{-(h2 * h2 - 2 * h2 + 8) / (2 * h2 * d2), {"Y"}},
                {h / d2, {"YZ", "ZY"}},
                {-(3 * h2 - 4) / (h2 * d2), {"ZYZ"}}});
}

std::optional<Divergence> a_h1_divergence(double h_star) {
  if (near(h_star, 0.0)) return Divergence{-0.25, combo({{1.0, {"Y"}}, {-1.0, {"ZYZ"}}})};
  // (Y - YZ - ZY + ZYZ) is four times the projected flip P Y P.
  if (near(h_star, 2.0)) return Divergence{-0.125, combo({{1.0, {"Y", "ZYZ"}}, {-1.0, {"YZ", "ZY"}}})};
  return std::nullopt;
}

TransOp a_g1(double h) {
  if (near(h, 0.0)) return combo({{1.0 / 8, {"XYZ", "ZYX"}}, {-1.0 / 8, {"YXZ", "ZXY"}}});
  if (near(h, 1.0))
    return combo({{1.0 / 12, {"XY", "YX"}},
                  {-1.0 / 32, {"YXZ", "ZXY"}},
                  {-5.0 / 96, {"XYZ", "ZYX"}},
                  {-5.0 / 96, {"ZXYZ", "ZYXZ"}}});
  if (near(h, 2.0))
    return combo({{1.0 / 8, {"XY", "YX"}},
                  {1.0 / 24, {"YXZ", "ZXY"}},
                  {-1.0 / 96, {"XYZ", "ZYX"}},
                  {-1.0 / 12, {"ZXYZ", "ZYXZ"}}});
  if (near(h, -1.0) || near(h, -2.0))
    throw std::domain_error("a_g1 special value at negative h is not tabulated");
  const double a = 1 / (4 * h * (4 - h * h));
  const double b = -1 / (8 * (1 - h * h));
  const double c = 3 / (8 * h * (1 - h * h) * (4 - h * h));
  return combo({{a, {"XY", "YX"}}, {b, {"YXZ", "ZXY"}}, {-b, {"XYZ", "ZYX"}}, {c, {"ZXYZ", "ZYXZ"}}});
}

TransOp a_h2(double h) {
  for (double s : {0.0, 1.0, -1.0, 2.0, -2.0}) {
    if (near(h, s)) throw std::domain_error("a_h2 is only defined away from h in {0, +-1, +-2}");
  }
  const double h2 = h * h, h4 = h2 * h2, h6 = h4 * h2;
  const double d = (h2 - 1) * (h2 - 1) * (h2 - 4) * (h2 - 4);
  return combo({{(10 * h6 - 5 * h4 - 35 * h2 + 12) / (16 * h2 * d), {"XY", "YX"}},
                {-(h6 + 12 * h4 - 30 * h2 + 8) / (8 * h * d), {"XYZ", "ZYX"}},
                {h / (8 * (h2 - 1) * (h2 - 1)), {"YXZ", "ZXY"}},
                {(23 * h4 - 61 * h2 + 20) / (16 * h2 * d), {"ZXYZ", "ZYXZ"}}});
}

TransOp heisenberg_x(double t, double h) {
  const double cp = std::cos(2 * (h + 2) * t), c0 = std::cos(2 * h * t), cm = std::cos(2 * (h - 2) * t);
  const double sp = std::sin(2 * (h + 2) * t), s0 = std::sin(2 * h * t), sm = std::sin(2 * (h - 2) * t);
  return combo({{(cp + 2 * c0 + cm) / 4, {"X"}},
                {-(sp + 2 * s0 + sm) / 4, {"Y"}},
                {(cp - cm) / 4, {"XZ", "ZX"}},
                {(cp - 2 * c0 + cm) / 4, {"ZXZ"}},
                {-(sp - sm) / 4, {"YZ", "ZY"}},
                {-(sp - 2 * s0 + sm) / 4, {"ZYZ"}}});
}

TransOp chi(double t, double h) {
  if (near(h, 0.0) || near(std::abs(h), 2.0)) throw std::domain_error("chi has secular terms at h in {0, +-2}");
  const double sp = std::sin(2 * (h + 2) * t) / (h + 2), s0 = std::sin(2 * h * t) / h,
               sm = std::sin(2 * (h - 2) * t) / (h - 2);
  const double vp = (1 - std::cos(2 * (h + 2) * t)) / (h + 2), v0 = (1 - std::cos(2 * h * t)) / h,
               vm = (1 - std::cos(2 * (h - 2) * t)) / (h - 2);
  return combo({{(sp + 2 * s0 + sm) / 8, {"X"}},
                {(sp - sm) / 8, {"XZ", "ZX"}},
                {(sp - 2 * s0 + sm) / 8, {"ZXZ"}},
                {-(vp + 2 * v0 + vm) / 8, {"Y"}},
                {-(vp - vm) / 8, {"YZ", "ZY"}},
                {-(vp - 2 * v0 + vm) / 8, {"ZYZ"}}});
}

TransOp projected(const TransOp& core) {
  TransOp out;
  for (const auto& [w, c] : core.terms()) {
    out.add(w, 0.25 * c);
    out.add("Z" + w, -0.25 * c);
    out.add(w + "Z", -0.25 * c);
    out.add("Z" + w + "Z", 0.25 * c);
  }
  return out.prune();
}

TransOp singular_operator(double h_star) {
  if (near(h_star, 0.0)) return combo({{1.0, {"Y"}}, {-1.0, {"ZYZ"}}});
  if (near(h_star, 2.0)) return projected(TransOp("Y", 1.0));
  if (near(h_star, 1.0)) return projected(combo({{1.0, {"XY", "YX"}}}));
  if (near(h_star, 2.0 / 3.0)) return projected(combo({{1.0, {"YXX", "XYX", "XXY"}}, {-1.0, {"YYY"}}}));
  throw std::invalid_argument("no singular operator registered at h = " + std::to_string(h_star));
}

double perturbative_optimal_angle(double h, double g) {
  if (near(h, 0.0) || near(std::abs(h), 2.0)) {
    const double phi = std::atan2(g, h);
    // Radial direction, folded onto [-pi/2, pi/2).
    double r = std::fmod(phi + std::numbers::pi / 2, std::numbers::pi);
    if (r < 0) r += std::numbers::pi;
    return r - std::numbers::pi / 2;
  }
  const double h2 = h * h;
  const double num = 2 * g * (h2 * h2 * h2 + 24 * h2 - 32);
  const double den = h * (h2 - 4) * (h2 * h2 - 2 * h2 + 8);
  return 0.5 * std::atan(num / den);
}

}  // namespace vagp::pert
