#pragma once

#include <optional>
#include <utility>

#include "vagp/pauli.hpp"

namespace vagp::pert {

/// Points within this distance of a special field value use its dedicated branch.
inline constexpr double kSpecialPointTol = 1e-9;

/// Zeroth-order gauge potential for the transverse direction near g = 0.
TransOp a_g0(double h);

/// First-order (in g) gauge potential for the longitudinal direction. Throws
/// std::domain_error at h = 0 and h = 2, where it diverges; see a_h1_divergence.
TransOp a_h1(double h);

/// Divergent form at h* in {0, 2}: a_h1(h) ~ residue / (h - h*)^2 * operator.
struct Divergence {
  double residue;
  TransOp op;
};
std::optional<Divergence> a_h1_divergence(double h_star);

/// First-order correction to the transverse-direction potential.
TransOp a_g1(double h);

/// Second-order longitudinal correction; only defined away from h in {0, 1, 2}.
TransOp a_h2(double h);

/// e^{iH0 t} X e^{-iH0 t} with H0 = ZZ + hZ.
TransOp heisenberg_x(double t, double h);

/// Time integral of heisenberg_x from 0 to t. Requires h not in {0, 2, -2}.
TransOp chi(double t, double h);

/// Local operator that diverges at the classical degeneracy h* in {0, 2, 1, 2/3}
/// (all with the sign of h* positive; the spin-flipped copies follow by symmetry).
TransOp singular_operator(double h_star);

/// Sum over sites of P (core) P with P = (1 - Z)/2 on the sites flanking `core`.
TransOp projected(const TransOp& core);

/// Leading-order optimal angle near the classical line, in [-pi/2, pi/2).
/// At h in {0, 2} returns the radial direction atan2(g, h).
double perturbative_optimal_angle(double h, double g);

}  // namespace vagp::pert
