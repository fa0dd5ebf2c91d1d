#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vagp/exact.hpp"
#include "vagp/vagp.hpp"

namespace vagp::dynamics {

using exact::SpinOperator;
using exact::StateVector;

enum class RampKind { sin_square, linear };

RampKind parse_ramp(std::string_view name);
std::string to_string(RampKind kind);

/// lambda(t) from 0 to 1 over [0, T]; couplings move along start + lambda (end - start).
struct RampProtocol {
  RampKind kind = RampKind::sin_square;
  double T = 1.0;
  CouplingPoint start;
  CouplingPoint end;

  double lambda(double t) const;
  double lambda_dot(double t) const;
  CouplingPoint at(double lambda) const;
};

/// Counterdiabatic term. k = 0 is the bare evolution.
struct CdConfig {
  int k = 0;
  int grid_points = 101;
  bool resolve_each_step = false;  // solve at every evaluation instead of interpolating the grid
  SolverOptions solver;
};

struct EvolveOptions {
  double dt = 0.0;  // 0: min(1e-3 T, 0.04 / spectral bound)
  int samples = 101;
  double run_drift_tol = 1e-8;
  double step_drift_tol = 1e-10;
};

struct TracePoint {
  double t, lambda, h, g, energy, variance;
};

struct EvolveResult {
  std::vector<TracePoint> trace;
  StateVector final_state;
  double final_variance = 0.0;
  double dt = 0.0;
  long steps = 0;
  double norm_drift = 0.0;  // sum of per-step |norm - 1| before renormalization
};

/// Raised when the integrator loses unitarity beyond tolerance.
class StepSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ZZ + h Z + g X on an L-ring, applied without rebuilding per coupling.
class IsingChain {
 public:
  explicit IsingChain(int L);
  int sites() const { return L_; }
  void apply(CouplingPoint p, const StateVector& in, StateVector& out, Complex scale = 1.0,
             bool accumulate = false) const;
  double energy(CouplingPoint p, const StateVector& psi) const;
  double variance(CouplingPoint p, const StateVector& psi) const;
  /// Upper bound on the spectral radius.
  double bound(CouplingPoint p) const;

 private:
  int L_;
  Eigen::VectorXd zz_, z_;  // diagonals
  SpinOperator x_;
};

/// VAGP along a path, A_lambda = dh A_h + dg A_g, tabulated on a lambda grid.
class PathPotential {
 public:
  PathPotential(const RampProtocol& protocol, const CdConfig& cd, int L);

  bool active() const { return k_ > 0; }
  Eigen::VectorXd coefficients(double lambda) const;
  /// out += scale * A(lambda) * in.
  void apply(double lambda, const StateVector& in, StateVector& out, Complex scale) const;
  /// Upper bound on the spectral radius of A over the grid.
  double bound() const { return bound_; }

 private:
  Eigen::VectorXd solve_at(double lambda) const;

  // One translated copy of a basis word: out[s ^ flip] += phase * (-1)^|s & mask| * in[s].
  struct RingTerm {
    std::uint32_t flip, mask;
    Complex phase;
    Eigen::Index word;
  };

  RampProtocol protocol_;
  CdConfig cd_;
  int k_ = 0;
  std::vector<Eigen::VectorXd> grid_;
  std::vector<RingTerm> terms_;
  double bound_ = 0.0;
};

EvolveResult evolve(const StateVector& initial, const RampProtocol& protocol, const CdConfig& cd, int L,
                    const EvolveOptions& opts = {});

/// Infinitely fast limit: i d(psi)/d(lambda) = A_lambda psi over lambda in [0, 1].
struct DressingConfig {
  bool exact_agp = true;  // exact gauge potential from dense diagonalization
  int k = 3;              // ansatz size when exact_agp is false
  int steps = 400;        // RK4 steps in lambda
};

struct DressResult {
  StateVector final_state;
  double final_variance = 0.0;  // against H(end)
};

DressResult dress(const StateVector& initial, CouplingPoint start, CouplingPoint end, int L,
                  const DressingConfig& cfg = {});

/// Sudden-quench variance of `initial` under H(end).
double quench_variance(const StateVector& initial, CouplingPoint end, int L);

struct SweepEntry {
  CouplingPoint start, end;
  double rate = 0.0;  // 1/T
  double final_variance = 0.0;
};

/// Final variances for every (path, rate), starting from the mid-spectrum
/// eigenstate of H(start). Results are ordered path-major.
std::vector<SweepEntry> sweep_rate(const std::vector<std::pair<CouplingPoint, CouplingPoint>>& paths,
                                   const std::vector<double>& rates, int L, const CdConfig& cd, RampKind kind,
                                   int workers = 1);

struct LibraryState {
  std::string name;
  std::string spins;  // 'u'/'d' per site
  StateVector state;
  bool dark = false;  // annihilated by the projected flip PYP
};

/// Period-4 dark state, Neel state, and (L = 12 only) a non-symmetric dark/bright pair.
std::vector<LibraryState> dark_state_library(int L);

/// ||PYP psi|| on an L-ring.
double projected_flip_weight(const StateVector& psi, int L);

}  // namespace vagp::dynamics
