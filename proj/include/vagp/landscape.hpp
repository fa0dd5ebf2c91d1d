#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vagp/vagp.hpp"

namespace vagp::landscape {

struct Domain {
  double hmin = 0.0, hmax = 3.0, gmin = 0.0, gmax = 2.0;
  bool contains(CouplingPoint p) const { return p.h >= hmin && p.h <= hmax && p.g >= gmin && p.g <= gmax; }
};

/// Classical-line degeneracies that act as sources/sinks for a k-body ansatz:
/// (0,0), (+-2,0) for k >= 3; (+-1,0) for k >= 4; (+-2/3,0) for k >= 7.
std::vector<CouplingPoint> singular_points(int k);

struct FieldNode {
  double h = 0, g = 0;
  OptimalDirection dir;
  bool singular = false;  // coincides with a registered singular point
};

/// Row-major over g (outer) then h (inner).
struct FlowField {
  Domain domain;
  int nh = 0, ng = 0, k = 0;
  std::vector<FieldNode> nodes;

  const FieldNode& at(int ih, int ig) const { return nodes[static_cast<std::size_t>(ig) * nh + ih]; }
};

FlowField compute_field(const Domain& domain, int nh, int ng, int k, const SolverOptions& opts = {}, int workers = 1);

enum class Termination { singularity_proximity, domain_boundary, max_steps };
std::string to_string(Termination t);

struct Streamline {
  std::vector<CouplingPoint> points;
  Termination reason = Termination::max_steps;
  std::optional<CouplingPoint> singularity;  // the point that captured the line
};

struct StreamlineOptions {
  double step = 0.01;
  int max_steps = 5000;
  double capture_radius = 0.02;
};

/// Traces the optimal-direction field with RK4. The field is defined modulo pi;
/// every evaluation is signed to agree with the previous tangent, the first
/// with `initial_hint` (a direction vector in the (h, g) plane).
Streamline integrate_streamline(int k, const Domain& domain, CouplingPoint start, CouplingPoint initial_hint,
                                const StreamlineOptions& opts = {}, const SolverOptions& solver = {});

/// Least-squares slope of log(y) against log(x); non-positive samples are skipped.
double power_law_exponent(const std::vector<double>& x, const std::vector<double>& y);

struct NormSample {
  double r, norm_opt, norm_orth;
};

struct NormScan {
  std::vector<NormSample> samples;
  double exponent_opt = 0.0;
  double exponent_orth = 0.0;
  double opt_variation = 0.0;  // (max - min) / max of norm_opt over the samples
};

/// Norms along the ray (h, g) = r (cos theta, sin theta).
NormScan norm_scan(double theta, const std::vector<double>& radii, int k, const SolverOptions& opts = {},
                   int workers = 1);

struct CoefficientSeries {
  std::string label;  // e.g. "Y-ZYZ", "YZ+ZY", "XY-YX"
  std::vector<double> weight;  // |c|^2 per radius
  double exponent = 0.0;       // fitted in |c|^2
  bool vanishing = false;      // zero to round-off at every radius
};

struct CoefficientScan {
  std::vector<double> radii;
  bool optimal = true;
  std::vector<CoefficientSeries> series;

  const CoefficientSeries* find(const std::string& label) const;
};

/// Per-combination weights of the VAGP along a ray, in the optimal or
/// orthogonal direction. Words are paired with their mirror images into
/// (w + rev w)/sqrt2 and (w - rev w)/sqrt2; Y and ZYZ are combined into Y -+ ZYZ.
CoefficientScan coefficient_scan(double theta, const std::vector<double>& radii, int k, bool optimal,
                                 const SolverOptions& opts = {}, int workers = 1);

struct GammaRow {
  double coupling;
  CouplingPoint point;
  int k;
  double gamma;
  double phi;
};

/// Decay rate along a list of points, each in the optimal direction of its own k.
std::vector<GammaRow> gamma_sweep(const std::vector<CouplingPoint>& points, const std::vector<double>& couplings,
                                  const std::vector<int>& ks, const SolverOptions& opts = {}, int workers = 1);

/// Evenly spaced values from a to b inclusive.
std::vector<double> linspace(double a, double b, int n);
/// Log-spaced values from a to b inclusive.
std::vector<double> logspace(double a, double b, int n);

}  // namespace vagp::landscape
