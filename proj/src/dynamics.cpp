#include "vagp/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>

#include "vagp/parallel.hpp"
#include "vagp/pert.hpp"

namespace vagp::dynamics {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kMinusI{0.0, -1.0};

Eigen::VectorXd diagonal_of(const TransOp& op, int L) {
  return SpinOperator::compile(op, L).to_dense().diagonal().real();
}

}  // namespace

RampKind parse_ramp(std::string_view name) {
  if (name == "sin_square" || name == "sin2") return RampKind::sin_square;
  if (name == "linear") return RampKind::linear;
  throw std::invalid_argument("unknown ramp '" + std::string(name) + "' (expected sin_square or linear)");
}

std::string to_string(RampKind kind) { return kind == RampKind::linear ? "linear" : "sin_square"; }

double RampProtocol::lambda(double t) const {
  const double x = std::clamp(t / T, 0.0, 1.0);
  if (kind == RampKind::linear) return x;
  const double s = std::sin(kPi * x / 2);
  const double u = kPi / 2 * s * s;
  return std::sin(u) * std::sin(u);
}

double RampProtocol::lambda_dot(double t) const {
  const double x = std::clamp(t / T, 0.0, 1.0);
  if (kind == RampKind::linear) return 1.0 / T;
  const double s = std::sin(kPi * x / 2);
  const double u = kPi / 2 * s * s;
  // d/dt sin^2(u) = sin(2u) u', u' = (pi/2) sin(pi x) (pi / 2T)
  return std::sin(2 * u) * (kPi / 2) * std::sin(kPi * x) * (kPi / (2 * T));
}

CouplingPoint RampProtocol::at(double lam) const {
  return {start.h + lam * (end.h - start.h), start.g + lam * (end.g - start.g)};
}

// ---------------------------------------------------------------------------

IsingChain::IsingChain(int L)
    : L_(L),
      zz_(diagonal_of(TransOp("ZZ", 1.0), L)),
      z_(diagonal_of(TransOp("Z", 1.0), L)),
      x_(SpinOperator::compile(TransOp("X", 1.0), L)) {}

void IsingChain::apply(CouplingPoint p, const StateVector& in, StateVector& out, Complex scale,
                       bool accumulate) const {
  if (!accumulate || out.size() != in.size()) out = StateVector::Zero(in.size());
  out.array() += scale * ((zz_ + p.h * z_).cast<Complex>().array() * in.array());
  if (p.g != 0.0) x_.apply(in, out, scale * p.g, true);
}

double IsingChain::energy(CouplingPoint p, const StateVector& psi) const {
  StateVector hpsi;
  apply(p, psi, hpsi);
  return psi.dot(hpsi).real();
}

double IsingChain::variance(CouplingPoint p, const StateVector& psi) const {
  StateVector hpsi;
  apply(p, psi, hpsi);
  const double mean = psi.dot(hpsi).real();
  return std::max(0.0, hpsi.squaredNorm() - mean * mean);
}

double IsingChain::bound(CouplingPoint p) const { return L_ * (1.0 + std::abs(p.h) + std::abs(p.g)); }

// ---------------------------------------------------------------------------

PathPotential::PathPotential(const RampProtocol& protocol, const CdConfig& cd, int L)
    : protocol_(protocol), cd_(cd), k_(cd.k) {
  if (k_ < 0) throw std::invalid_argument("CD ansatz size must be >= 0");
  if (k_ == 0) return;
  if (k_ > L) throw std::invalid_argument("CD ansatz support exceeds the chain length");
  if (cd.grid_points < 2) throw std::invalid_argument("CD grid needs at least 2 points");
  const auto basis = cached_basis(k_, cd.solver.parity_filter);
  for (std::size_t n = 0; n < basis->words.size(); ++n) {
    const std::string& w = basis->words[n];
    for (int t = 0; t < L; ++t) {
      RingTerm term{0, 0, 1.0, static_cast<Eigen::Index>(n)};
      int ny = 0;
      for (std::size_t j = 0; j < w.size(); ++j) {
        const std::uint32_t bit = std::uint32_t{1} << (L - 1 - static_cast<int>((j + t) % L));
        if (w[j] == 'X' || w[j] == 'Y') term.flip |= bit;
        if (w[j] == 'Y' || w[j] == 'Z') term.mask |= bit;
        if (w[j] == 'Y') ++ny;
      }
      for (int q = 0; q < (ny & 3); ++q) term.phase *= Complex(0.0, 1.0);
      terms_.push_back(term);
    }
  }
  if (!cd.resolve_each_step) {
    grid_.resize(static_cast<std::size_t>(cd.grid_points));
    parallel_for(grid_.size(), cd.solver.workers, [&](std::size_t i) {
      grid_[i] = solve_at(static_cast<double>(i) / (cd.grid_points - 1));
    });
    for (const auto& c : grid_) bound_ = std::max(bound_, L * c.lpNorm<1>());
  } else {
    for (int i = 0; i < cd.grid_points; ++i)
      bound_ = std::max(bound_, L * solve_at(static_cast<double>(i) / (cd.grid_points - 1)).lpNorm<1>());
  }
}

Eigen::VectorXd PathPotential::solve_at(double lambda) const {
  SolverOptions opts = cd_.solver;
  opts.workers = 1;
  const DirectionalPair pair = solve_pair(protocol_.at(lambda), k_, opts);
  const double dh = protocol_.end.h - protocol_.start.h;
  const double dg = protocol_.end.g - protocol_.start.g;
  return dh * pair.c_h + dg * pair.c_g;
}

Eigen::VectorXd PathPotential::coefficients(double lambda) const {
  if (k_ == 0) return {};
  if (cd_.resolve_each_step) return solve_at(lambda);
  const double x = std::clamp(lambda, 0.0, 1.0) * (cd_.grid_points - 1);
  const auto i = std::min(static_cast<int>(x), cd_.grid_points - 2);
  const double f = x - i;
  return (1 - f) * grid_[static_cast<std::size_t>(i)] + f * grid_[static_cast<std::size_t>(i + 1)];
}

void PathPotential::apply(double lambda, const StateVector& in, StateVector& out, Complex scale) const {
  if (k_ == 0) return;
  const Eigen::VectorXd c = coefficients(lambda);
  const Eigen::Index dim = in.size();
  const Complex* x = in.data();
  Complex* y = out.data();
  for (const RingTerm& term : terms_) {
    if (c[term.word] == 0.0) continue;
    const Complex a = scale * c[term.word] * term.phase;
    for (Eigen::Index s = 0; s < dim; ++s) {
      const bool odd = std::popcount(static_cast<std::uint32_t>(s) & term.mask) & 1;
      y[s ^ term.flip] += odd ? -a * x[s] : a * x[s];
    }
  }
}

// ---------------------------------------------------------------------------

EvolveResult evolve(const StateVector& initial, const RampProtocol& protocol, const CdConfig& cd, int L,
                    const EvolveOptions& opts) {
  if (initial.size() != (Eigen::Index{1} << L)) throw std::invalid_argument("initial state does not match L");
  if (std::abs(initial.norm() - 1.0) > 1e-10) throw std::invalid_argument("initial state is not normalized");
  if (!(protocol.T > 0)) throw std::invalid_argument("ramp duration T must be positive");

  const IsingChain chain(L);
  const PathPotential cd_term(protocol, cd, L);

  double omega = std::max(chain.bound(protocol.start), chain.bound(protocol.end));
  if (cd_term.active()) {
    double max_rate = 0.0;
    for (int i = 0; i <= 1000; ++i) max_rate = std::max(max_rate, std::abs(protocol.lambda_dot(protocol.T * i / 1000.0)));
    omega += max_rate * cd_term.bound();
  }
  double dt = opts.dt > 0 ? opts.dt : std::min(1e-3 * protocol.T, 0.04 / omega);
  const long steps = std::max(1L, static_cast<long>(std::ceil(protocol.T / dt - 1e-9)));
  dt = protocol.T / static_cast<double>(steps);

  auto rhs = [&](double t, const StateVector& psi, StateVector& out) {
    const double lam = protocol.lambda(t);
    chain.apply(protocol.at(lam), psi, out, kMinusI);
    if (cd_term.active()) {
      const double rate = protocol.lambda_dot(t);
      if (rate != 0.0) cd_term.apply(lam, psi, out, kMinusI * rate);
    }
  };

  EvolveResult res;
  res.dt = dt;
  res.steps = steps;
  const int samples = std::max(2, opts.samples);
  auto record = [&](double t, const StateVector& psi) {
    const double lam = protocol.lambda(t);
    const CouplingPoint p = protocol.at(lam);
    StateVector hpsi;
    chain.apply(p, psi, hpsi);
    const double e = psi.dot(hpsi).real();
    res.trace.push_back({t, lam, p.h, p.g, e, std::max(0.0, hpsi.squaredNorm() - e * e)});
  };

  StateVector psi = initial;
  StateVector k1, k2, k3, k4, tmp;
  long next_sample = 1;
  record(0.0, psi);
  for (long n = 0; n < steps; ++n) {
    const double t = n * dt;
    rhs(t, psi, k1);
    tmp = psi + (dt / 2) * k1;
    rhs(t + dt / 2, tmp, k2);
    tmp = psi + (dt / 2) * k2;
    rhs(t + dt / 2, tmp, k3);
    tmp = psi + dt * k3;
    rhs(t + dt, tmp, k4);
    psi += (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    const double norm = psi.norm();
    const double drift = std::abs(norm - 1.0);
    res.norm_drift += drift;
    if (drift > opts.step_drift_tol || res.norm_drift > opts.run_drift_tol) {
      throw StepSizeError("norm drift " + std::to_string(drift) + " (accumulated " + std::to_string(res.norm_drift) +
                          ") at step " + std::to_string(n) + " with dt = " + std::to_string(dt) +
                          "; reduce the step size");
    }
    psi /= norm;
    const long sample_step = (next_sample * steps) / (samples - 1);
    if (n + 1 == sample_step) {
      record((n + 1) * dt, psi);
      ++next_sample;
    }
  }
  res.final_variance = res.trace.back().variance;
  res.final_state = std::move(psi);
  return res;
}

// ---------------------------------------------------------------------------

DressResult dress(const StateVector& initial, CouplingPoint start, CouplingPoint end, int L,
                  const DressingConfig& cfg) {
  if (cfg.steps < 1) throw std::invalid_argument("dressing needs at least one step");
  const RampProtocol path{RampKind::linear, 1.0, start, end};
  const TransOp dH = (end.h - start.h) * TransOp("Z", 1.0) + (end.g - start.g) * TransOp("X", 1.0);
  const exact::DenseOperator dH_dense = exact::materialize(dH.empty() ? TransOp("Z", 0.0) : dH, L);

  std::unique_ptr<PathPotential> variational;
  if (!cfg.exact_agp) {
    CdConfig cd;
    cd.k = cfg.k;
    cd.resolve_each_step = true;
    cd.grid_points = 2;
    variational = std::make_unique<PathPotential>(path, cd, L);
  }
  auto rhs = [&](double lam, const StateVector& psi, StateVector& out) {
    out = StateVector::Zero(psi.size());
    if (cfg.exact_agp) {
      const auto H = exact::materialize(build_hamiltonian(path.at(lam).h, path.at(lam).g), L);
      out = kMinusI * (exact::exact_agp(H, dH_dense).matrix * psi);
    } else {
      variational->apply(lam, psi, out, kMinusI);
    }
  };

  StateVector psi = initial;
  StateVector k1, k2, k3, k4;
  const double h = 1.0 / cfg.steps;
  for (int n = 0; n < cfg.steps; ++n) {
    const double lam = n * h;
    rhs(lam, psi, k1);
    rhs(lam + h / 2, psi + (h / 2) * k1, k2);
    rhs(lam + h / 2, psi + (h / 2) * k2, k3);
    rhs(lam + h, psi + h * k3, k4);
    psi += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    psi.normalize();
  }
  DressResult out;
  out.final_variance = IsingChain(L).variance(end, psi);
  out.final_state = std::move(psi);
  return out;
}

double quench_variance(const StateVector& initial, CouplingPoint end, int L) {
  return IsingChain(L).variance(end, initial);
}

// ---------------------------------------------------------------------------

std::vector<SweepEntry> sweep_rate(const std::vector<std::pair<CouplingPoint, CouplingPoint>>& paths,
                                   const std::vector<double>& rates, int L, const CdConfig& cd, RampKind kind,
                                   int workers) {
  std::vector<StateVector> initial(paths.size());
  parallel_for(paths.size(), workers, [&](std::size_t i) {
    const auto H = exact::materialize(build_hamiltonian(paths[i].first.h, paths[i].first.g), L);
    initial[i] = exact::mid_spectrum_state(H).second;
  });
  std::vector<SweepEntry> out(paths.size() * rates.size());
  parallel_for(out.size(), workers, [&](std::size_t j) {
    const std::size_t p = j / rates.size(), r = j % rates.size();
    if (!(rates[r] > 0)) throw std::invalid_argument("ramp rates must be positive");
    const RampProtocol protocol{kind, 1.0 / rates[r], paths[p].first, paths[p].second};
    CdConfig local = cd;
    local.solver.workers = 1;
    const EvolveResult res = evolve(initial[p], protocol, local, L);
    out[j] = {paths[p].first, paths[p].second, rates[r], res.final_variance};
  });
  return out;
}

// ---------------------------------------------------------------------------

double projected_flip_weight(const StateVector& psi, int L) {
  return (SpinOperator::compile(pert::singular_operator(2.0), L) * psi).norm();
}

std::vector<LibraryState> dark_state_library(int L) {
  if (L < 4) throw std::invalid_argument("dark-state library needs L >= 4");
  std::vector<std::pair<std::string, std::string>> specs;
  std::string period4, neel;
  for (int j = 0; j < L; ++j) {
    period4 += (j % 4 < 2) ? 'u' : 'd';
    neel += (j % 2 == 0) ? 'u' : 'd';
  }
  specs.emplace_back("period4", period4);
  specs.emplace_back("neel", neel);
  if (L == 12) {
    specs.emplace_back("nonsymmetric_dark", "duuduuuduuuu");
    specs.emplace_back("nonsymmetric_bright", "duududduuddd");
  }
  std::vector<LibraryState> out;
  for (auto& [name, spins] : specs) {
    LibraryState s;
    s.name = name;
    s.spins = spins;
    s.state = exact::product_state(spins);
    s.dark = projected_flip_weight(s.state, L) < 1e-12;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace vagp::dynamics
