#pragma once

// Exact full-Hilbert-space reference implementation for small spin counts.
// Computational basis index bit i is site i; a clear bit is |0> (spin up).

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "mqc/sym_operator.hpp"

namespace mqc::oracle {

using Mat = Eigen::MatrixXcd;

inline constexpr int kMaxSpins = 12;

// Throws SizeError unless 1 <= n <= kMaxSpins.
void check_size(int n_spins);

struct SpinSystem {
  int n_spins = 0;
  Eigen::MatrixXd couplings;  // symmetric, zero diagonal, rad/s

  static SpinSystem uniform(int n_spins, double d);
  // Throws SizeError or ParameterError.
  void validate() const;
};

Mat site_operator(int n_spins, int site, const Matrix2c& op);
Mat collective(int n_spins, const Matrix2c& op);

// sum_{i != j} d_ij (3 I^z_i I^z_j - I_i . I_j)
Mat h_dd(const SpinSystem& sys);
// sum_{i != j} d'_ij (I^a_i I^a_j - (I^b_i I^b_j + I^c_i I^c_j) / 2) for
// a = x, y, z, with d' taken from the system couplings.
Mat h_x(const SpinSystem& sys);
Mat h_y(const SpinSystem& sys);
Mat h_z(const SpinSystem& sys);

// Dense matrix of a symmetric-basis operator and the inverse projection
// c(l) = Tr(T_l^dagger M).
Mat embed(const SymOperator& op);
SymOperator project(const Mat& m, const BasisPtr& basis);

// Structure constants by explicit matrix products and projection.
std::map<int, double> structure_constants(const BasisPtr& basis, const Label& a,
                                          const Label& b);

Mat rotate_z(const Mat& rho, double phi);

// Per-spin phase damping with Kraus operators diag(1, sqrt(1-p)) and
// diag(0, sqrt(p)), applied site by site.
Mat dephase_kraus(const Mat& rho, double p);

// exp(-iHt) rho exp(iHt) through the eigendecomposition of H.
Mat evolve_unitary(const Mat& rho, const Mat& h, double t);

// Solution of d rho/dt = -i[H, rho] - kappa [V, [V, rho]] by a scaled
// Taylor series of the generator action.
Mat evolve_lindblad(const Mat& rho, const Mat& h, const Mat& v, double kappa, double t);

// Spectral QFI 2 sum (l_i - l_j)^2 / (l_i + l_j) |G_ij|^2, skipping pairs with
// l_i + l_j < 1e-12. Throws InputError for a non-positive rho.
double qfi_exact(const Mat& rho, const Mat& g);

double trace_distance(const Mat& a, const Mat& b);

// Sum over the matrix elements of order q of |rho_ab|^2, for q in [-N, N].
std::vector<double> coherence_spectrum(const Mat& rho);

enum class Axis { PlusX, MinusX, PlusY, MinusY };

struct PulseEvent {
  bool is_pulse = false;
  double duration = 0.0;  // seconds; zero for an ideal pulse
  Axis axis = Axis::PlusX;
  double angle = 0.0;     // nominal flip angle, rad
};

struct PulseSequence {
  std::vector<PulseEvent> events;
  double delta = 0.0;        // Delta
  double delta_prime = 0.0;  // Delta'
  double tau_pi2 = 0.0;
  bool delta_pulses = false;

  int pulse_count() const;
  double free_time() const;
  double cycle_time() const;
};

// Delays (D/2, D', D, D', D, D', D, D', D/2) around eight pi/2 pulses, the
// first four about +x and the last four about -x. Finite pulses use
// D' = 2D + tau and last tau each; ideal pulses use D' = 2D and zero width.
// Throws ParameterError for non-positive Delta or tau.
PulseSequence eight_pulse_cycle(double delta, double tau_pi2, bool delta_pulses = false);

struct TogglingAverage {
  Mat total;
  Mat y_frame_part;  // frames rotated by an odd multiple of pi/2
  Mat z_frame_part;  // frames rotated by an even multiple of pi/2
};

// Time-weighted average of the lab dipolar Hamiltonian in the toggling frame
// of an ideal-pulse sequence with flip-angle errors eps_k (rad):
// H~_k = exp(i T_k I^x) H_dd exp(-i T_k I^x), T_k the cumulative signed angle
// of the first k - 1 pulses. Weights are the delay durations over the free time.
TogglingAverage toggling_average(const SpinSystem& sys, const PulseSequence& seq,
                                 const std::vector<double>& eps);

// Propagator of one cycle. `widths` holds one pulse duration per pulse; for
// ideal pulses the flip angle is scaled by width / tau_pi2 instead.
Mat cycle_propagator(const SpinSystem& sys, const PulseSequence& seq,
                     const std::vector<double>& widths);

struct JitterModel {
  double amplitude = 0.0;  // delta, seconds; widths uniform in tau -+ delta/2
  std::uint64_t seed = 0;
};

struct MonteCarloOptions {
  // Undo the net x rotation each cycle picks up from the width errors, so
  // the ensemble stays in the frame of the error-free cycle.
  bool frame_correction = true;
  // Pair every draw with its mirror image about tau.
  bool antithetic = true;
  int threads = 1;
};

// Ensemble average of exact propagations with i.i.d. pulse widths. Sample s
// draws from a generator seeded by (seed, s), so the result does not depend
// on the worker count.
Mat monte_carlo_jitter(const Mat& rho0, const SpinSystem& sys, const PulseSequence& seq,
                       const JitterModel& jitter, int n_cycles, int n_samples,
                       const MonteCarloOptions& opts = {});

}  // namespace mqc::oracle
