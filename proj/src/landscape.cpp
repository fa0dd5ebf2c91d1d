#include "vagp/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "vagp/parallel.hpp"

namespace vagp::landscape {

namespace {

double distance(CouplingPoint a, CouplingPoint b) { return std::hypot(a.h - b.h, a.g - b.g); }

SolverOptions serial(SolverOptions opts) {
  opts.workers = 1;
  return opts;
}

}  // namespace

std::vector<CouplingPoint> singular_points(int k) {
  std::vector<CouplingPoint> pts;
  if (k >= 3) pts.insert(pts.end(), {{0.0, 0.0}, {2.0, 0.0}, {-2.0, 0.0}});
  if (k >= 4) pts.insert(pts.end(), {{1.0, 0.0}, {-1.0, 0.0}});
  if (k >= 7) pts.insert(pts.end(), {{2.0 / 3.0, 0.0}, {-2.0 / 3.0, 0.0}});
  return pts;
}

std::vector<double> linspace(double a, double b, int n) {
  if (n < 1) throw std::invalid_argument("linspace needs n >= 1");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

std::vector<double> logspace(double a, double b, int n) {
  if (!(a > 0 && b > 0)) throw std::invalid_argument("logspace bounds must be positive");
  auto v = linspace(std::log(a), std::log(b), n);
  for (auto& x : v) x = std::exp(x);
  return v;
}

FlowField compute_field(const Domain& domain, int nh, int ng, int k, const SolverOptions& opts, int workers) {
  if (nh < 2 || ng < 2) throw std::invalid_argument("field resolution must be at least 2 per axis");
  FlowField field;
  field.domain = domain;
  field.nh = nh;
  field.ng = ng;
  field.k = k;
  field.nodes.resize(static_cast<std::size_t>(nh) * ng);
  const auto hs = linspace(domain.hmin, domain.hmax, nh);
  const auto gs = linspace(domain.gmin, domain.gmax, ng);
  const auto singular = singular_points(k);
  cached_ising_adjoint(k, opts.parity_filter);  // build once before fanning out
  parallel_for(field.nodes.size(), workers, [&](std::size_t i) {
    FieldNode& node = field.nodes[i];
    node.h = hs[i % nh];
    node.g = gs[i / nh];
    node.dir = optimal_angle({node.h, node.g}, k, serial(opts));
    for (const auto& s : singular) node.singular = node.singular || distance({node.h, node.g}, s) < 1e-12;
  });
  return field;
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::singularity_proximity: return "singularity_proximity";
    case Termination::domain_boundary: return "domain_boundary";
    case Termination::max_steps: return "max_steps";
  }
  return "unknown";
}

Streamline integrate_streamline(int k, const Domain& domain, CouplingPoint start, CouplingPoint initial_hint,
                                const StreamlineOptions& opts, const SolverOptions& solver) {
  if (!domain.contains(start)) throw std::invalid_argument("streamline start lies outside the domain");
  const auto singular = singular_points(k);
  for (const auto& s : singular) {
    if (distance(start, s) < 1e-12) throw std::invalid_argument("streamline start sits on a singular point");
  }
  if (opts.step <= 0) throw std::invalid_argument("streamline step must be positive");

  // Unit tangent of the optimal direction at p, signed along `prev`.
  auto tangent = [&](CouplingPoint p, CouplingPoint prev) {
    const double phi = optimal_angle(p, k, solver).phi_opt;
    CouplingPoint d{std::cos(phi), std::sin(phi)};
    if (d.h * prev.h + d.g * prev.g < 0) d = {-d.h, -d.g};
    return d;
  };
  auto captured_by = [&](CouplingPoint p) -> std::optional<CouplingPoint> {
    for (const auto& s : singular) {
      if (distance(p, s) < opts.capture_radius) return s;
    }
    return std::nullopt;
  };

  Streamline line;
  line.points.push_back(start);
  if (auto s = captured_by(start)) {
    line.reason = Termination::singularity_proximity;
    line.singularity = s;
    return line;
  }
  CouplingPoint prev = initial_hint;
  CouplingPoint p = start;
  const double h = opts.step;
  for (int n = 0; n < opts.max_steps; ++n) {
    const CouplingPoint k1 = tangent(p, prev);
    const CouplingPoint k2 = tangent({p.h + h / 2 * k1.h, p.g + h / 2 * k1.g}, k1);
    const CouplingPoint k3 = tangent({p.h + h / 2 * k2.h, p.g + h / 2 * k2.g}, k2);
    const CouplingPoint k4 = tangent({p.h + h * k3.h, p.g + h * k3.g}, k3);
    const CouplingPoint next{p.h + h / 6 * (k1.h + 2 * k2.h + 2 * k3.h + k4.h),
                             p.g + h / 6 * (k1.g + 2 * k2.g + 2 * k3.g + k4.g)};
    if (!domain.contains(next)) {
      line.reason = Termination::domain_boundary;
      return line;
    }
    prev = {next.h - p.h, next.g - p.g};
    p = next;
    line.points.push_back(p);
    if (auto s = captured_by(p)) {
      line.reason = Termination::singularity_proximity;
      line.singularity = s;
      return line;
    }
  }
  line.reason = Termination::max_steps;
  return line;
}

double power_law_exponent(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (!(x[i] > 0 && y[i] > 0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

NormScan norm_scan(double theta, const std::vector<double>& radii, int k, const SolverOptions& opts, int workers) {
  for (double r : radii) {
    if (!(r > 0)) throw std::invalid_argument("scan radii must be positive");
  }
  NormScan scan;
  scan.samples.resize(radii.size());
  cached_ising_adjoint(k, opts.parity_filter);
  parallel_for(radii.size(), workers, [&](std::size_t i) {
    const double r = radii[i];
    const auto dir = optimal_angle({r * std::cos(theta), r * std::sin(theta)}, k, serial(opts));
    scan.samples[i] = {r, dir.norm_opt, dir.norm_orth};
  });
  std::vector<double> opt, orth;
  for (const auto& s : scan.samples) {
    opt.push_back(s.norm_opt);
    orth.push_back(s.norm_orth);
  }
  scan.exponent_opt = power_law_exponent(radii, opt);
  scan.exponent_orth = power_law_exponent(radii, orth);
  if (!opt.empty()) {
    const auto [lo, hi] = std::minmax_element(opt.begin(), opt.end());
    scan.opt_variation = *hi > 0 ? (*hi - *lo) / *hi : 0.0;
  }
  return scan;
}

const CoefficientSeries* CoefficientScan::find(const std::string& label) const {
  for (const auto& s : series) {
    if (s.label == label) return &s;
  }
  return nullptr;
}

CoefficientScan coefficient_scan(double theta, const std::vector<double>& radii, int k, bool optimal,
                                 const SolverOptions& opts, int workers) {
  CoefficientScan scan;
  scan.radii = radii;
  scan.optimal = optimal;
  std::vector<Eigen::VectorXd> coeffs(radii.size());
  const auto basis = cached_ising_adjoint(k, opts.parity_filter)->basis_ptr();
  parallel_for(radii.size(), workers, [&](std::size_t i) {
    const double r = radii[i];
    if (!(r > 0)) throw std::invalid_argument("scan radii must be positive");
    const auto pair = solve_pair({r * std::cos(theta), r * std::sin(theta)}, k, serial(opts));
    const auto dir = optimal_angle(pair);
    coeffs[i] = pair.at(optimal ? dir.phi_opt : dir.phi_orth).coeffs;
  });

  // Combination table: label -> list of (word index, weight).
  std::vector<std::pair<std::string, std::vector<std::pair<int, double>>>> combos;
  const double s = 1.0 / std::sqrt(2.0);
  const int iy = basis->find("Y"), izyz = basis->find("ZYZ");
  if (iy >= 0 && izyz >= 0) {
    combos.push_back({"Y-ZYZ", {{iy, s}, {izyz, -s}}});
    combos.push_back({"Y+ZYZ", {{iy, s}, {izyz, s}}});
  }
  for (std::size_t n = 0; n < basis->size(); ++n) {
    const std::string& w = basis->words[n];
    if (w == "Y" || w == "ZYZ") continue;
    const std::string rev(w.rbegin(), w.rend());
    const int m = basis->find(rev);
    if (rev == w) {
      combos.push_back({w, {{static_cast<int>(n), 1.0}}});
    } else if (m > static_cast<int>(n)) {
      combos.push_back({w + "+" + rev, {{static_cast<int>(n), s}, {m, s}}});
      combos.push_back({w + "-" + rev, {{static_cast<int>(n), s}, {m, -s}}});
    }
  }
  double scale = 0.0;
  for (const auto& c : coeffs) scale = std::max(scale, c.squaredNorm());
  for (const auto& [label, parts] : combos) {
    CoefficientSeries series;
    series.label = label;
    // Mirror-odd combinations vanish by reflection symmetry; what is left is round-off.
    const bool odd = parts.size() == 2 && parts[1].second < 0 && label != "Y-ZYZ";
    const double floor = (odd ? 1e-12 : 1e-20) * std::max(scale, 1e-300);
    series.vanishing = true;
    for (const auto& c : coeffs) {
      double v = 0.0;
      for (const auto& [idx, wt] : parts) v += wt * c[idx];
      series.weight.push_back(v * v);
      if (v * v > floor) series.vanishing = false;
    }
    series.exponent = series.vanishing ? std::numeric_limits<double>::quiet_NaN()
                                       : power_law_exponent(radii, series.weight);
    scan.series.push_back(std::move(series));
  }
  return scan;
}

std::vector<GammaRow> gamma_sweep(const std::vector<CouplingPoint>& points, const std::vector<double>& couplings,
                                  const std::vector<int>& ks, const SolverOptions& opts, int workers) {
  if (points.size() != couplings.size()) throw std::invalid_argument("points and couplings differ in length");
  for (int k : ks) cached_ising_adjoint(k, opts.parity_filter);
  std::vector<GammaRow> rows(points.size() * ks.size());
  parallel_for(rows.size(), workers, [&](std::size_t j) {
    const int k = ks[j / points.size()];
    const std::size_t i = j % points.size();
    const auto pair = solve_pair(points[i], k, serial(opts));
    const double phi = optimal_angle(pair).phi_opt;
    rows[j] = {couplings[i], points[i], k, lifetime(pair.at(phi)).gamma, phi};
  });
  return rows;
}

}  // namespace vagp::landscape
