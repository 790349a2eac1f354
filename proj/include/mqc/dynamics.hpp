#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mqc/states.hpp"
#include "mqc/superop.hpp"

namespace mqc {

// Dissipator constant for a uniform pulse-width jitter on the eight-pulse
// cycle, kappa = c (delta / tau_pi2)^2 tau_cycle with V built from d' = 2d.
// Each pulse error eps_k enters the cycle average as a_k eps_k V with
// sum_k a_k^2 = 50/144; eps is uniform with variance (pi/2)^2 (delta/tau)^2/12
// and kappa = tau_cycle E[a^2] / 2.
double default_dissipator_constant();

enum class RunPlan {
  EchoMatched,      // reverse L2 loops jittered, then L1 - L2 clean loops
  PartialReversal,  // reverse L2 jittered loops only
};

RunPlan parse_run_plan(const std::string& s);
std::string to_string(RunPlan plan);

// Rk4: fixed steps, doubled until two successive results agree to the
// tolerance. Expm: dense exponential of the generator. Taylor: truncated
// Taylor series of the generator action on substeps of norm <= 3.
enum class PropagationMethod { Rk4, Expm, Taylor };

PropagationMethod parse_propagation_method(const std::string& s);
std::string to_string(PropagationMethod m);

struct EvolutionConfig {
  double coupling = 1.0;        // d, rad/s
  double cycle_time = 1.0;      // tau_c, s
  int loops_prepare = 0;        // L1
  int loops_reverse = 0;        // L2
  double jitter = 0.0;          // delta in units of tau_pi2
  double c = default_dissipator_constant();
  int steps_per_loop = 16;
  double tolerance = 1e-10;     // relative step-doubling error target
  RunPlan plan = RunPlan::EchoMatched;
  double dephasing = 0.0;       // p applied once after preparation
  PropagationMethod integrator = PropagationMethod::Rk4;
  int threads = 1;              // workers for independent scan points

  double kappa() const { return c * jitter * jitter * cycle_time; }
  void validate() const;  // throws ParameterError
};

// -(d/2) sum_{i != j} (I+_i I+_j + I-_i I-_j)
SymOperator dq_hamiltonian(const BasisPtr& basis, double d);

// (3/2) d' sum_{i != j} (I^y_i I^z_j + I^z_i I^y_j), ordered pairs as in
// H_dd. With H_z built from the same d', V = i[I^x, H_z] = -i[I^x, H_y].
SymOperator v_operator(const BasisPtr& basis, double d_prime);

// exp(-i phi I_z) rho exp(i phi I_z)
SymOperator rotate_z(const SymOperator& rho, double phi);

// Per-spin phase damping: coefficient scaled by (1 - p)^(h/2).
SymOperator dephase(const SymOperator& rho, double p);

// Generator x -> -i[H, x] - kappa [V, [V, x]].
class Liouvillian {
 public:
  Liouvillian(const SymOperator& h, const SymOperator& v, double kappa);

  double kappa() const { return kappa_; }
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  // Dense generator for the matrix-exponential path.
  Eigen::MatrixXcd dense() const;
  // Upper bound on the induced 1-norm.
  double norm_bound() const;
  const BasisPtr& basis_ptr() const { return basis_; }

 private:
  BasisPtr basis_;
  SuperOperatorMatrix::Sparse comm_h_;
  SuperOperatorMatrix::Sparse comm_v_;
  double kappa_;
};

struct PropagationResult {
  SymOperator state;
  long steps_used = 0;
  double error_estimate = 0.0;
  bool accuracy_warning = false;
  std::vector<std::string> warnings;
};

struct PropagationOptions {
  PropagationMethod method = PropagationMethod::Rk4;
  double tolerance = 1e-10;
  long max_steps = 1L << 22;
  // Largest dimension for which the dense exponential is attempted.
  Eigen::Index expm_max_dim = 4000;
};

PropagationResult propagate(const SymOperator& rho0, const Liouvillian& gen,
                            double t, long steps,
                            const PropagationOptions& opts = {});

PropagationResult propagate(const SymOperator& rho0, const SymOperator& h,
                            const SymOperator& v, double kappa, double t,
                            long steps, const PropagationOptions& opts = {});

struct ScanResult {
  int n_spins = 0;
  std::vector<double> phi;
  std::vector<double> signal;
  std::vector<std::string> warnings;
};

enum class ScanMethod { Auto, Direct, Adjoint };

// Uniform grid of `points` phases from 0 to pi inclusive.
std::vector<double> phase_grid(int points);

// Prepared state after L1 loops under H (and optional dephasing).
SymOperator prepare_state(const SymOperator& seed, const EvolutionConfig& cfg,
                          std::vector<std::string>* warnings = nullptr);

// Full readout: prepare, rotate_z(phi), reverse under -H with the jitter
// dissipator per the run plan, rotate_z(-phi), S = Re <observable, rho>.
// The observable defaults to I_z scaled to unit norm. With an order-zero
// observable the Auto method propagates the observable backwards once.
ScanResult phase_scan(const SymOperator& seed, const EvolutionConfig& cfg,
                      const std::vector<double>& phi_grid,
                      const std::optional<SymOperator>& observable = std::nullopt,
                      ScanMethod method = ScanMethod::Auto);

// Fourier analysis of a scan over one pi period. Sample k of the M distinct
// phases phi_k = k pi / M picks up exp(-i q phi_k) from order q, so only
// even orders with |q| < M are resolvable. A grid that includes the end
// point pi drops it as the copy of phi = 0. Intensities are magnitudes of
// the Fourier coefficients. suppress_zero subtracts the signal mean first and
// reports q = 0 as exactly 0. Orders up to max_order (default: n_spins) are
// reported; requesting |q| >= M throws ResolutionError.
CoherenceSpectrum spectrum_from_scan(const ScanResult& scan, bool suppress_zero,
                                     std::optional<int> max_order = std::nullopt);

}  // namespace mqc
