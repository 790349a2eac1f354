#include "mqc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "mqc/errors.hpp"
#include "mqc/parallel.hpp"

namespace mqc {

double default_dissipator_constant() {
  const double pi = std::numbers::pi;
  return 25.0 * pi * pi / 6912.0;
}

RunPlan parse_run_plan(const std::string& s) {
  if (s == "echo-matched") return RunPlan::EchoMatched;
  if (s == "partial-reversal") return RunPlan::PartialReversal;
  throw ParameterError("unknown run plan '" + s +
                       "' (expected echo-matched|partial-reversal)");
}

std::string to_string(RunPlan plan) {
  return plan == RunPlan::EchoMatched ? "echo-matched" : "partial-reversal";
}

void EvolutionConfig::validate() const {
  if (!(cycle_time > 0.0)) throw ParameterError("cycle_time must be positive");
  if (!std::isfinite(coupling)) throw ParameterError("coupling must be finite");
  if (loops_prepare < 0 || loops_reverse < 0) {
    throw ParameterError("loop counts must be non-negative");
  }
  if (plan == RunPlan::EchoMatched && loops_reverse > loops_prepare) {
    throw ParameterError("echo-matched plan needs loops_reverse <= loops_prepare");
  }
  if (!(jitter >= 0.0)) throw ParameterError("jitter must be non-negative");
  if (!(c >= 0.0)) throw ParameterError("dissipator constant must be non-negative");
  if (steps_per_loop < 1) throw ParameterError("steps_per_loop must be at least 1");
  if (!(tolerance > 0.0)) throw ParameterError("tolerance must be positive");
  if (!(dephasing >= 0.0 && dephasing <= 1.0)) {
    throw ParameterError("dephasing must lie in [0, 1]");
  }
}

SymOperator dq_hamiltonian(const BasisPtr& basis, double d) {
  SymOperator h = two_body(basis, spin::raise(), spin::raise());
  h += two_body(basis, spin::lower(), spin::lower());
  h *= -0.5 * d;
  return h;
}

SymOperator v_operator(const BasisPtr& basis, double d_prime) {
  SymOperator v = two_body(basis, spin::iy(), spin::iz());
  v += two_body(basis, spin::iz(), spin::iy());
  v *= 1.5 * d_prime;
  return v;
}

SymOperator rotate_z(const SymOperator& rho, double phi) {
  SymOperator out = rho;
  auto& c = out.coeffs();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int q = rho.basis().label(i).order();
    if (q != 0) c[static_cast<Eigen::Index>(i)] *= std::polar(1.0, -phi * q);
  }
  return out;
}

SymOperator dephase(const SymOperator& rho, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ParameterError("dephasing strength must lie in [0, 1]");
  }
  SymOperator out = rho;
  auto& c = out.coeffs();
  const double s = std::sqrt(1.0 - p);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int h = rho.basis().label(i).h;
    if (h != 0) c[static_cast<Eigen::Index>(i)] *= std::pow(s, h);
  }
  return out;
}

Liouvillian::Liouvillian(const SymOperator& h, const SymOperator& v, double kappa)
    : basis_(h.basis_ptr()), kappa_(kappa) {
  require_same_basis(h, v);
  if (!(kappa >= 0.0)) throw ParameterError("kappa must be non-negative");
  const Eigen::Index d = static_cast<Eigen::Index>(basis_->size());
  comm_h_.resize(d, d);
  auto th = product_triplets(h, 1.0, -1.0);
  comm_h_.setFromTriplets(th.begin(), th.end());
  comm_h_.prune(cplx(0.0));
  comm_v_.resize(d, d);
  if (kappa > 0.0) {
    auto tv = product_triplets(v, 1.0, -1.0);
    comm_v_.setFromTriplets(tv.begin(), tv.end());
    comm_v_.prune(cplx(0.0));
  }
}

Eigen::VectorXcd Liouvillian::apply(const Eigen::VectorXcd& x) const {
  Eigen::VectorXcd y = cplx(0.0, -1.0) * (comm_h_ * x);
  if (kappa_ > 0.0) {
    Eigen::VectorXcd vx = comm_v_ * x;
    y.noalias() -= kappa_ * (comm_v_ * vx);
  }
  return y;
}

Eigen::MatrixXcd Liouvillian::dense() const {
  Eigen::MatrixXcd l = cplx(0.0, -1.0) * Eigen::MatrixXcd(comm_h_);
  if (kappa_ > 0.0) {
    const Eigen::MatrixXcd cv(comm_v_);
    l.noalias() -= kappa_ * (cv * cv);
  }
  return l;
}

double Liouvillian::norm_bound() const {
  auto norm1 = [](const SuperOperatorMatrix::Sparse& m) {
    Eigen::VectorXd col = Eigen::VectorXd::Zero(m.cols());
    for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
      for (SuperOperatorMatrix::Sparse::InnerIterator it(m, k); it; ++it) col[it.col()] += std::abs(it.value());
    }
    return col.size() ? col.maxCoeff() : 0.0;
  };
  const double v = kappa_ > 0.0 ? norm1(comm_v_) : 0.0;
  return norm1(comm_h_) + kappa_ * v * v;
}

PropagationMethod parse_propagation_method(const std::string& s) {
  if (s == "rk4") return PropagationMethod::Rk4;
  if (s == "expm") return PropagationMethod::Expm;
  if (s == "taylor") return PropagationMethod::Taylor;
  throw ParameterError("unknown integrator '" + s + "' (expected rk4|expm|taylor)");
}

std::string to_string(PropagationMethod m) {
  switch (m) {
    case PropagationMethod::Rk4: return "rk4";
    case PropagationMethod::Expm: return "expm";
    case PropagationMethod::Taylor: return "taylor";
  }
  return "rk4";
}

namespace {

// exp(t L) x0 by substeps with ||h L||_1 <= 3, each summed until two
// consecutive terms fall below the per-substep share of the tolerance.
Eigen::VectorXcd taylor(const Liouvillian& gen, const Eigen::VectorXcd& x0, double t,
                        double tol, long& n_sub) {
  const double theta = 3.0;
  n_sub = std::max(1L, static_cast<long>(std::ceil(gen.norm_bound() * t / theta)));
  const double h = t / static_cast<double>(n_sub);
  const double eps = std::max(tol / static_cast<double>(n_sub), 1e-17);
  Eigen::VectorXcd x = x0;
  for (long s = 0; s < n_sub; ++s) {
    Eigen::VectorXcd term = x;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 200; ++k) {
      term = gen.apply(term) * (h / k);
      x += term;
      const double tn = term.norm();
      if (tn <= eps * x.norm() && prev <= eps * x.norm()) break;
      prev = tn;
    }
  }
  return x;
}

Eigen::VectorXcd rk4(const Liouvillian& gen, const Eigen::VectorXcd& x0, double t,
                     long n) {
  const double h = t / static_cast<double>(n);
  Eigen::VectorXcd x = x0;
  for (long s = 0; s < n; ++s) {
    const Eigen::VectorXcd k1 = gen.apply(x);
    const Eigen::VectorXcd k2 = gen.apply(x + (0.5 * h) * k1);
    const Eigen::VectorXcd k3 = gen.apply(x + (0.5 * h) * k2);
    const Eigen::VectorXcd k4 = gen.apply(x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

}  // namespace

PropagationResult propagate(const SymOperator& rho0, const Liouvillian& gen,
                            double t, long steps, const PropagationOptions& opts) {
  if (rho0.n_spins() != gen.basis_ptr()->n_spins()) {
    throw IncompatibleError("state and generator use different bases");
  }
  if (!(t >= 0.0)) throw ParameterError("propagation time must be non-negative");
  if (steps < 1) throw ParameterError("step count must be at least 1");

  PropagationResult res{rho0, 0, 0.0, false, {}};
  if (t == 0.0) return res;

  const auto& x0 = rho0.coeffs();
  const Eigen::Index dim = x0.size();
  if (opts.method == PropagationMethod::Expm && dim <= opts.expm_max_dim) {
    const Eigen::MatrixXcd l = gen.dense() * t;
    res.state.coeffs() = l.exp() * x0;
  } else if (opts.method == PropagationMethod::Taylor) {
    res.state.coeffs() = taylor(gen, x0, t, opts.tolerance, res.steps_used);
  } else {
    if (opts.method == PropagationMethod::Expm) {
      res.warnings.push_back("dimension " + std::to_string(dim) +
                             " exceeds the dense exponential limit; used RK4");
    }
    long n = steps;
    Eigen::VectorXcd coarse = rk4(gen, x0, t, n);
    for (;;) {
      Eigen::VectorXcd fine = rk4(gen, x0, t, 2 * n);
      const double scale = std::max(fine.norm(), 1e-300);
      const double err = (fine - coarse).norm() / scale;
      res.steps_used = 2 * n;
      res.error_estimate = err / 15.0;
      coarse = std::move(fine);
      if (err <= opts.tolerance) break;
      if (4 * n > opts.max_steps) {
        res.accuracy_warning = true;
        res.warnings.push_back("step cap reached with relative error " +
                               std::to_string(err));
        break;
      }
      n *= 2;
    }
    res.state.coeffs() = std::move(coarse);
  }

  const cplx tr0 = rho0.trace();
  const cplx tr1 = res.state.trace();
  if (std::abs(tr1 - tr0) > 1e-9 * std::max(1.0, std::abs(tr0))) {
    res.accuracy_warning = true;
    res.warnings.push_back("trace drifted by " + std::to_string(std::abs(tr1 - tr0)));
  }
  return res;
}

PropagationResult propagate(const SymOperator& rho0, const SymOperator& h,
                            const SymOperator& v, double kappa, double t,
                            long steps, const PropagationOptions& opts) {
  require_same_basis(rho0, h);
  return propagate(rho0, Liouvillian(h, v, kappa), t, steps, opts);
}

std::vector<double> phase_grid(int points) {
  if (points < 2) throw GridError("a phase grid needs at least 2 points");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    g[static_cast<std::size_t>(k)] = std::numbers::pi * k / (points - 1);
  }
  return g;
}

namespace {

void check_grid(const std::vector<double>& phi) {
  if (phi.empty()) throw GridError("phase grid is empty");
  const double eps = 1e-12;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    if (!(phi[k] >= -eps && phi[k] <= std::numbers::pi + eps)) {
      throw GridError("phase " + std::to_string(phi[k]) + " outside [0, pi]");
    }
    if (k > 0 && !(phi[k] > phi[k - 1])) throw GridError("phase grid is not ascending");
  }
}

struct Evolver {
  SymOperator h;
  SymOperator v;
  PropagationOptions opts;
  long steps;
  std::vector<std::string>* warnings;

  SymOperator run(const SymOperator& x, double sign, double kappa, double t) const {
    if (t == 0.0) return x;
    SymOperator hs = h;
    hs *= sign;
    PropagationResult r = propagate(x, hs, v, kappa, t, steps, opts);
    if (warnings) {
      for (auto& w : r.warnings) warnings->push_back(std::move(w));
    }
    return std::move(r.state);
  }
};

Evolver make_evolver(const BasisPtr& basis, const EvolutionConfig& cfg, int loops,
                     std::vector<std::string>* warnings) {
  PropagationOptions opts;
  opts.tolerance = cfg.tolerance;
  opts.method = cfg.integrator;
  return {dq_hamiltonian(basis, cfg.coupling), v_operator(basis, 2.0 * cfg.coupling),
          opts, static_cast<long>(cfg.steps_per_loop) * std::max(loops, 1), warnings};
}

}  // namespace

SymOperator prepare_state(const SymOperator& seed, const EvolutionConfig& cfg,
                          std::vector<std::string>* warnings) {
  cfg.validate();
  const Evolver ev = make_evolver(seed.basis_ptr(), cfg, cfg.loops_prepare, warnings);
  SymOperator rho = ev.run(seed, 1.0, 0.0, cfg.loops_prepare * cfg.cycle_time);
  if (cfg.dephasing > 0.0) rho = dephase(rho, cfg.dephasing);
  return rho;
}

ScanResult phase_scan(const SymOperator& seed, const EvolutionConfig& cfg,
                      const std::vector<double>& phi_grid,
                      const std::optional<SymOperator>& observable,
                      ScanMethod method) {
  cfg.validate();
  check_grid(phi_grid);
  const BasisPtr& basis = seed.basis_ptr();

  SymOperator obs = observable ? *observable : thermal_state(basis);
  require_same_basis(seed, obs);
  bool order_zero = true;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (basis->label(i).order() != 0 && obs.coeffs()[static_cast<Eigen::Index>(i)] != 0.0) {
      order_zero = false;
      break;
    }
  }
  if (method == ScanMethod::Adjoint && !order_zero) {
    throw InputError("adjoint scan needs an observable of coherence order 0");
  }
  const bool adjoint = method == ScanMethod::Adjoint || (method == ScanMethod::Auto && order_zero);

  ScanResult out;
  out.n_spins = seed.n_spins();
  out.phi = phi_grid;
  out.signal.assign(phi_grid.size(), 0.0);

  const SymOperator rho1 = prepare_state(seed, cfg, &out.warnings);
  const double kappa = cfg.kappa();
  const double t_rev = cfg.loops_reverse * cfg.cycle_time;
  const double t_rest = cfg.plan == RunPlan::EchoMatched
                            ? (cfg.loops_prepare - cfg.loops_reverse) * cfg.cycle_time
                            : 0.0;
  const Evolver ev_rev = make_evolver(basis, cfg, cfg.loops_reverse, nullptr);
  const Evolver ev_rest =
      make_evolver(basis, cfg, cfg.loops_prepare - cfg.loops_reverse, nullptr);

  if (adjoint) {
    // <O, E(R_phi rho1)> = <E^dagger O, R_phi rho1>; the adjoint of the
    // reverse-time generator is the forward-time one with the same kappa.
    std::vector<std::string> w;
    Evolver a = ev_rest;
    a.warnings = &w;
    Evolver b = ev_rev;
    b.warnings = &w;
    SymOperator back = a.run(obs, 1.0, 0.0, t_rest);
    back = b.run(back, 1.0, kappa, t_rev);
    for (auto& s : w) out.warnings.push_back(std::move(s));
    for (std::size_t k = 0; k < phi_grid.size(); ++k) {
      out.signal[k] = hs_inner(back, rotate_z(rho1, phi_grid[k])).real();
    }
    return out;
  }

  std::vector<std::vector<std::string>> w(phi_grid.size());
  parallel_for(phi_grid.size(), cfg.threads, [&](std::size_t k) {
    Evolver a = ev_rev;
    a.warnings = &w[k];
    Evolver b = ev_rest;
    b.warnings = &w[k];
    SymOperator x = rotate_z(rho1, phi_grid[k]);
    x = a.run(x, -1.0, kappa, t_rev);
    x = b.run(x, -1.0, 0.0, t_rest);
    x = rotate_z(x, -phi_grid[k]);
    out.signal[k] = hs_inner(obs, x).real();
  });
  for (auto& ws : w) {
    for (auto& s : ws) out.warnings.push_back(std::move(s));
  }
  return out;
}

CoherenceSpectrum spectrum_from_scan(const ScanResult& scan, bool suppress_zero,
                                     std::optional<int> max_order) {
  const auto& phi = scan.phi;
  if (phi.size() != scan.signal.size()) {
    throw GridError("phase and signal lengths differ");
  }
  if (phi.size() < 2) throw ResolutionError("a spectrum needs at least 2 samples");
  check_grid(phi);

  // Detect M from the spacing, then require phi_k = k pi / M.
  const double pi = std::numbers::pi;
  const double step = phi[1] - phi[0];
  const long m_long = std::lround(pi / step);
  if (m_long < 1 || std::abs(phi[0]) > 1e-9) {
    throw GridError("spectrum extraction needs a uniform grid starting at 0");
  }
  std::size_t M = static_cast<std::size_t>(m_long);
  for (std::size_t k = 0; k < phi.size(); ++k) {
    if (std::abs(phi[k] - pi * static_cast<double>(k) / static_cast<double>(M)) > 1e-9) {
      throw GridError("spectrum extraction needs a uniform grid of spacing pi/M");
    }
  }
  if (phi.size() == M + 1) {
    // phi = pi repeats phi = 0 for even orders.
  } else if (phi.size() != M) {
    throw GridError("grid must cover one period [0, pi) or [0, pi]");
  }

  std::vector<double> s(scan.signal.begin(), scan.signal.begin() + static_cast<long>(M));
  if (suppress_zero) {
    double mean = 0.0;
    for (double v : s) mean += v;
    mean /= static_cast<double>(M);
    for (double& v : s) v -= mean;
  }

  int qmax;
  if (max_order) {
    qmax = *max_order;
  } else if (scan.n_spins > 0) {
    qmax = scan.n_spins;
  } else {
    qmax = static_cast<int>(M) - 1;
  }
  if (qmax < 0) throw RangeError("maximum order must be non-negative");
  if (static_cast<std::size_t>(qmax) >= M) {
    throw ResolutionError("order " + std::to_string(qmax) + " needs more than " +
                          std::to_string(M) + " distinct phases");
  }

  CoherenceSpectrum spec;
  spec.n_spins = scan.n_spins;
  for (int q = -(qmax - qmax % 2); q <= qmax; q += 2) {
    if (q == 0 && suppress_zero) {
      spec.intensities[0] = 0.0;
      continue;
    }
    cplx acc = 0.0;
    for (std::size_t k = 0; k < M; ++k) {
      acc += s[k] * std::polar(1.0, q * pi * static_cast<double>(k) / static_cast<double>(M));
    }
    spec.intensities[q] = std::abs(acc) / static_cast<double>(M);
  }
  return spec;
}

}  // namespace mqc
