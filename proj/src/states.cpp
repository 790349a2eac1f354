#include "mqc/states.hpp"

#include <cmath>
#include <limits>

#include "mqc/errors.hpp"

namespace mqc {

double CoherenceSpectrum::at(int q) const {
  auto it = intensities.find(q);
  return it == intensities.end() ? 0.0 : it->second;
}

double CoherenceSpectrum::total() const {
  double t = 0.0;
  for (const auto& [q, v] : intensities) t += v;
  return t;
}

CoherenceSpectrum CoherenceSpectrum::normalized_copy() const {
  const double t = total();
  if (!(t > 0.0)) throw RangeError("cannot normalize an all-zero spectrum");
  CoherenceSpectrum out = *this;
  for (auto& [q, v] : out.intensities) v /= t;
  out.normalized = true;
  return out;
}

CoherenceSpectrum CoherenceSpectrum::even_nonnegative() const {
  CoherenceSpectrum out;
  out.n_spins = n_spins;
  for (const auto& [q, v] : intensities) {
    if (q >= 0 && q % 2 == 0) out.intensities[q] = v;
  }
  return out.normalized_copy();
}

WeightMode parse_weight_mode(const std::string& s) {
  if (s == "equal") return WeightMode::Equal;
  if (s == "gaussian") return WeightMode::Gaussian;
  throw SpecError("unknown weight mode '" + s + "' (expected equal|gaussian)");
}

std::string to_string(WeightMode mode) {
  return mode == WeightMode::Equal ? "equal" : "gaussian";
}

void ClusterSpec::validate() const {
  if (n_spins < 1) throw SpecError("cluster n_spins must be positive");
  if (co_max < 0 || co_max % 2 != 0) {
    throw SpecError("co_max must be an even non-negative integer, got " +
                    std::to_string(co_max));
  }
  if (co_max > n_spins) {
    throw SpecError("co_max " + std::to_string(co_max) + " exceeds n_spins " +
                    std::to_string(n_spins));
  }
  if (!(width() > 0.0)) throw SpecError("gaussian_width must be positive");
  if (!(mixing >= 0.0 && mixing <= 1.0)) throw SpecError("mixing must lie in [0, 1]");
}

namespace {

double sector_weight(const ClusterSpec& spec, int q) {
  if (spec.weight_mode == WeightMode::Equal) return 1.0;
  const double w = spec.width();
  const double v = std::exp(-static_cast<double>(q) * q / (2.0 * w * w));
  return v < kGaussianCutoff ? 0.0 : v;
}

// Unit-norm operator with equal amplitude on every computational-basis
// element of coherence order q: coefficient proportional to k(m, n, h).
void add_flat_sector(const SymmetricBasis& basis, int q, double amplitude,
                     Eigen::VectorXcd& out) {
  double log_sum = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis.label(i).order() != q) continue;
    const double x = 2.0 * basis.log_norm(i);
    const double hi = std::max(log_sum, x);
    log_sum = hi + std::log(std::exp(log_sum - hi) + std::exp(x - hi));
  }
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis.label(i).order() != q) continue;
    out[static_cast<Eigen::Index>(i)] +=
        amplitude * std::exp(basis.log_norm(i) - 0.5 * log_sum);
  }
}

}  // namespace

SymOperator cluster_correlations(const ClusterSpec& spec, const BasisPtr& basis) {
  spec.validate();
  if (basis->n_spins() != spec.n_spins) {
    throw SpecError("cluster spec n_spins does not match the basis");
  }
  SymOperator c = thermal_state(basis);
  c *= std::sqrt(sector_weight(spec, 0));
  for (int q = 2; q <= spec.co_max; q += 2) {
    const double amp = std::sqrt(sector_weight(spec, q));
    if (amp == 0.0) continue;
    add_flat_sector(*basis, q, amp, c.coeffs());
    add_flat_sector(*basis, -q, amp, c.coeffs());
  }
  c *= 1.0 / c.hs_norm();
  return c;
}

double positivity_bound(int n_spins) { return std::ldexp(1.0, -n_spins); }

SymOperator build_cluster(const ClusterSpec& spec, const BasisPtr& basis) {
  const double lambda = spec.mixing * positivity_bound(spec.n_spins);
  SymOperator rho = maximally_mixed(basis);
  SymOperator c = cluster_correlations(spec, basis);
  c *= lambda;
  rho += c;
  return rho;
}

SymOperator maximally_mixed(const BasisPtr& basis) {
  SymOperator id = SymOperator::identity(basis);
  id *= std::ldexp(1.0, -basis->n_spins());
  return id;
}

SymOperator ghz_state(const BasisPtr& basis) {
  const int N = basis->n_spins();
  SymOperator rho(basis);
  rho.coeff({N, N, 0}) = 0.5;
  rho.coeff({0, 0, 0}) = 0.5;
  rho.coeff({N, 0, N}) = 0.5;
  rho.coeff({0, N, N}) = 0.5;
  return rho;
}

SymOperator thermal_state(const BasisPtr& basis) {
  SymOperator iz = collective_z(basis);
  iz *= 1.0 / iz.hs_norm();
  return iz;
}

CoherenceSpectrum coherence_spectrum(const SymOperator& rho) {
  CoherenceSpectrum s;
  s.n_spins = rho.n_spins();
  for (int q = -s.n_spins; q <= s.n_spins; ++q) s.intensities[q] = 0.0;
  const auto& c = rho.coeffs();
  for (std::size_t i = 0; i < rho.size(); ++i) {
    s.intensities[rho.basis().label(i).order()] += std::norm(c[static_cast<Eigen::Index>(i)]);
  }
  return s;
}

}  // namespace mqc
