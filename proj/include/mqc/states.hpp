#pragma once

#include <map>
#include <optional>
#include <string>

#include "mqc/sym_operator.hpp"

namespace mqc {

// Coherence order q -> non-negative intensity.
struct CoherenceSpectrum {
  int n_spins = 0;
  std::map<int, double> intensities;
  bool normalized = false;

  double at(int q) const;
  double total() const;
  // Rescaled to unit sum; throws RangeError on an all-zero spectrum.
  CoherenceSpectrum normalized_copy() const;
  // Keeps even q >= 0 only and rescales them to unit sum.
  CoherenceSpectrum even_nonnegative() const;
};

enum class WeightMode { Equal, Gaussian };

WeightMode parse_weight_mode(const std::string& s);
std::string to_string(WeightMode mode);

struct ClusterSpec {
  int n_spins = 0;
  int co_max = 0;
  WeightMode weight_mode = WeightMode::Equal;
  // Defaults to n_spins / 3.5 when unset.
  std::optional<double> gaussian_width;
  // Fraction of the largest admixture that the norm bound certifies positive.
  double mixing = 1.0;

  double width() const { return gaussian_width.value_or(n_spins / 3.5); }
  // Throws SpecError.
  void validate() const;
};

// Relative sector weights below this are dropped in gaussian mode.
inline constexpr double kGaussianCutoff = 1e-12;

// Traceless, unit HS-norm correlation operator C of the cluster: the
// normalized thermal seed on q = 0 plus one block per even order
// 0 < |q| <= co_max. Every computational-basis element inside a block gets
// the same amplitude; blocks are weighted per ClusterSpec::weight_mode.
SymOperator cluster_correlations(const ClusterSpec& spec, const BasisPtr& basis);

// Largest lambda for which 1/2^N + lambda C is positive for any traceless C
// with unit HS norm: the spectral norm never exceeds the HS norm. Written as
// (1 - lambda) 1/2^N + lambda (C + 1/2^N) this is the admixture of a
// unit-trace correlated part to the maximally mixed state.
double positivity_bound(int n_spins);

// rho = 1/2^N + lambda C with lambda = mixing * positivity_bound; unit trace.
SymOperator build_cluster(const ClusterSpec& spec, const BasisPtr& basis);

// 1 / 2^N
SymOperator maximally_mixed(const BasisPtr& basis);

// (|0...0> + |1...1>)(<0...0| + <1...1|) / 2
SymOperator ghz_state(const BasisPtr& basis);

// sum_i I^z_i scaled to unit HS norm (traceless part of the thermal state).
SymOperator thermal_state(const BasisPtr& basis);

// intensities(q) = sum over labels with m - n = q of |c|^2.
CoherenceSpectrum coherence_spectrum(const SymOperator& rho);

}  // namespace mqc
