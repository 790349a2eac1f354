#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mqc/dynamics.hpp"
#include "mqc/states.hpp"

namespace mqc {

struct DistortionReport {
  double delta = 0.0;  // units of tau_pi2
  int m_c = 0;
  double value = 0.0;
};

// Mean of (s0(q) - s_delta(q))^2 over q = 0, 2, ..., m_c. The spectra are
// used as given; callers normalize them over even q >= 0 beforehand.
// Throws RangeError when m_c is odd, negative, or beyond either spectrum.
DistortionReport distortion_variance(const CoherenceSpectrum& s0,
                                     const CoherenceSpectrum& s_delta, int m_c,
                                     double delta = 0.0);

struct ClusterFit {
  double fwhh = 0.0;
  double amplitude = 0.0;
  double n_cl = 0.0;
  double residual = 0.0;  // RMS over fitted points
  int points = 0;
};

// sigma^2 / (4 ln 2)
double cluster_size_from_fwhh(double fwhh);

// Least-squares fit of I(q) = A exp(-4 ln 2 q^2 / sigma^2), so sigma is the
// full width at half height. Throws FitError with fewer than 3 points above
// the noise floor or when the solver does not converge.
ClusterFit gaussian_fit(const CoherenceSpectrum& s, bool exclude_zero = false,
                        double noise_floor = 1e-12);

struct QfiOptions {
  double rtol = 1e-10;  // eigenvalues below rtol * max are treated as zero
  // Relative residual of the solve above which a warning is attached.
  double residual_warn = 1e-6;
};

struct QfiResult {
  double value = 0.0;
  std::vector<std::string> warnings;
};

// F_Q = 2 <x, A^+ x> with x = -i[G, rho] and A the anticommutator
// superoperator of rho. Throws InputError for non-Hermitian rho or G.
QfiResult qfi(const SymOperator& rho, const SymOperator& generator,
              const QfiOptions& opts = {});

using ProbabilityFamily = std::function<std::vector<double>(double)>;

// Classical Fisher information by central differences. Outcomes with
// p_i(alpha) below `floor` are skipped. Throws InputError when a
// distribution is negative or does not sum to 1 within 1e-9.
double cfi(const ProbabilityFamily& family, double alpha, double d_alpha,
           double floor = 1e-12);

struct QfiRow {
  int m_c = 0;
  double p = 0.0;
  double qfi = 0.0;
  std::vector<std::string> warnings;
};

struct QfiSweepOptions {
  std::optional<double> gaussian_width;
  double mixing = 1.0;
  QfiOptions qfi;
  int threads = 1;
};

// build_cluster -> dephase -> qfi with collective I_z, for every (m_c, p)
// pair in row-major (m_c outer) order.
std::vector<QfiRow> qfi_vs_max_order(int n_spins, const std::vector<int>& m_c_list,
                                     const std::vector<double>& p_list,
                                     WeightMode mode,
                                     const QfiSweepOptions& opts = {});

// Fits D = a delta + b and returns max(0, (noise_rms - b) / a). Throws
// NoSensitivityError when a <= 0 and InputError with fewer than two
// distinct delta values.
double estimate_threshold(const std::vector<std::pair<double, double>>& samples,
                          double noise_rms);

struct JitterSweepSpec {
  EvolutionConfig evolution;       // its jitter field is overwritten per point
  std::vector<double> deltas;      // units of tau_pi2
  std::vector<int> m_c;
  int phase_points = 181;
  bool suppress_zero = true;
};

struct JitterSweepResult {
  std::vector<DistortionReport> rows;  // delta outer, m_c inner
  std::vector<CoherenceSpectrum> spectra;  // one per delta, normalized
  CoherenceSpectrum reference;             // delta = 0
  std::vector<std::string> warnings;
};

// Scans the readout at every delta, extracts the spectrum, normalizes it over
// even q >= 0, and compares with the jitter-free spectrum.
JitterSweepResult jitter_sweep(const SymOperator& seed, const JitterSweepSpec& spec);

// Ordinary least-squares coefficient of determination of y on x.
double linear_r_squared(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mqc
