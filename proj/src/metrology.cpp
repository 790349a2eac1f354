#include "mqc/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/NonLinearOptimization>

#include "mqc/errors.hpp"
#include "mqc/parallel.hpp"
#include "mqc/superop.hpp"

namespace mqc {

DistortionReport distortion_variance(const CoherenceSpectrum& s0,
                                     const CoherenceSpectrum& s_delta, int m_c,
                                     double delta) {
  if (m_c < 0 || m_c % 2 != 0) {
    throw RangeError("m_c must be an even non-negative integer, got " + std::to_string(m_c));
  }
  auto top = [](const CoherenceSpectrum& s) {
    return s.intensities.empty() ? -1 : s.intensities.rbegin()->first;
  };
  if (m_c > top(s0) || m_c > top(s_delta)) {
    throw RangeError("m_c " + std::to_string(m_c) + " exceeds the available orders");
  }
  double sum = 0.0;
  for (int q = 0; q <= m_c; q += 2) {
    const double d = s0.at(q) - s_delta.at(q);
    sum += d * d;
  }
  return {delta, m_c, sum / (m_c / 2 + 1)};
}

double cluster_size_from_fwhh(double fwhh) {
  return fwhh * fwhh / (4.0 * std::numbers::ln2);
}

namespace {

struct GaussianResidual {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const std::vector<double>& q;
  const std::vector<double>& y;

  int inputs() const { return 2; }
  int values() const { return static_cast<int>(q.size()); }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    const double k = 4.0 * std::numbers::ln2 / (x[1] * x[1]);
    for (std::size_t i = 0; i < q.size(); ++i) {
      f[static_cast<Eigen::Index>(i)] = x[0] * std::exp(-k * q[i] * q[i]) - y[i];
    }
    return 0;
  }

  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& j) const {
    const double s = x[1];
    const double k = 4.0 * std::numbers::ln2 / (s * s);
    for (std::size_t i = 0; i < q.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      const double e = std::exp(-k * q[i] * q[i]);
      j(r, 0) = e;
      j(r, 1) = x[0] * e * 2.0 * k * q[i] * q[i] / s;
    }
    return 0;
  }
};

}  // namespace

ClusterFit gaussian_fit(const CoherenceSpectrum& s, bool exclude_zero, double noise_floor) {
  std::vector<double> q;
  std::vector<double> y;
  double peak = 0.0;
  for (const auto& [order, v] : s.intensities) peak = std::max(peak, v);
  int above = 0;
  for (const auto& [order, v] : s.intensities) {
    if (exclude_zero && order == 0) continue;
    q.push_back(order);
    y.push_back(v);
    if (v > noise_floor * std::max(peak, 1.0)) ++above;
  }
  if (above < 3) {
    throw FitError("need at least 3 orders above the noise floor, found " +
                   std::to_string(above));
  }

  // Moment-based start: for a Gaussian the FWHH is sqrt(8 ln 2) times the
  // standard deviation of the profile.
  double w = 0.0, w2 = 0.0, amp = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double v = std::max(y[i], 0.0);
    w += v;
    w2 += v * q[i] * q[i];
    amp = std::max(amp, y[i]);
  }
  const double var = w > 0.0 ? w2 / w : 1.0;
  Eigen::VectorXd x(2);
  x << amp, std::sqrt(8.0 * std::numbers::ln2 * std::max(var, 0.25));

  GaussianResidual f{q, y};
  Eigen::LevenbergMarquardt<GaussianResidual> lm(f);
  lm.parameters.ftol = 1e-15;
  lm.parameters.xtol = 1e-15;
  lm.parameters.maxfev = 2000;
  const auto status = lm.minimize(x);
  if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters ||
      status == Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation ||
      !std::isfinite(x[1]) || x[1] == 0.0) {
    throw FitError("Gaussian fit did not converge");
  }

  ClusterFit fit;
  fit.amplitude = x[0];
  fit.fwhh = std::abs(x[1]);
  fit.n_cl = cluster_size_from_fwhh(fit.fwhh);
  Eigen::VectorXd r(f.values());
  f(x, r);
  fit.residual = std::sqrt(r.squaredNorm() / static_cast<double>(r.size()));
  fit.points = static_cast<int>(q.size());
  return fit;
}

namespace {

bool only_even_orders(const SymOperator& a) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.basis().label(i).order() % 2 != 0 &&
        a.coeffs()[static_cast<Eigen::Index>(i)] != 0.0) {
      return false;
    }
  }
  return true;
}

template <class Scalar>
QfiResult qfi_solve(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a,
                    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x,
                    const QfiOptions& opts) {
  QfiResult res;
  const double xn = x.norm();
  if (xn == 0.0) return res;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> es(a);
  if (es.info() != Eigen::Success) throw InputError("eigendecomposition failed");
  const auto& lam = es.eigenvalues();
  const double lmax = lam.cwiseAbs().maxCoeff();
  const double cut = opts.rtol * lmax;
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> proj = es.eigenvectors().adjoint() * x;
  double f = 0.0;
  double kept = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam[i] > cut) {
      f += std::norm(proj[i]) / lam[i];
      kept += std::norm(proj[i]);
    }
  }
  res.value = 2.0 * f;
  const double miss = std::sqrt(std::max(0.0, xn * xn - kept)) / xn;
  if (miss > opts.residual_warn) {
    res.warnings.push_back("pseudo-inverse solve left relative residual " +
                           std::to_string(miss));
  }
  return res;
}

}  // namespace

QfiResult qfi(const SymOperator& rho, const SymOperator& generator, const QfiOptions& opts) {
  require_same_basis(rho, generator);
  if (!rho.is_hermitian()) throw InputError("density operator is not Hermitian");
  if (!generator.is_hermitian()) throw InputError("generator is not Hermitian");

  SymOperator r = multiply(generator, rho) - multiply(rho, generator);
  const auto& basis = rho.basis();
  const std::size_t dim = basis.size();

  // The anticommutator with rho preserves the parity of q when rho holds even
  // orders only, so the solve can be restricted to the parity class of x.
  std::vector<bool> keep(dim, true);
  if (only_even_orders(rho)) {
    bool has_even = false, has_odd = false;
    for (std::size_t i = 0; i < dim; ++i) {
      if (r.coeffs()[static_cast<Eigen::Index>(i)] == 0.0) continue;
      (basis.label(i).order() % 2 == 0 ? has_even : has_odd) = true;
    }
    if (has_even != has_odd) {
      for (std::size_t i = 0; i < dim; ++i) {
        keep[i] = (basis.label(i).order() % 2 == 0) == has_even;
      }
    }
  }
  std::vector<Eigen::Index> pos(dim, -1);
  Eigen::Index n = 0;
  for (std::size_t i = 0; i < dim; ++i) {
    if (keep[i]) pos[i] = n++;
  }

  const auto triplets = product_triplets(rho, 1.0, 1.0, &keep);
  const bool real = rho.is_real() && r.is_real();
  if (real) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (const auto& t : triplets) a(pos[t.row()], pos[t.col()]) += t.value().real();
    Eigen::VectorXd x(n);
    for (std::size_t i = 0; i < dim; ++i) {
      if (keep[i]) x[pos[i]] = r.coeffs()[static_cast<Eigen::Index>(i)].real();
    }
    return qfi_solve<double>(a, x, opts);
  }
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& t : triplets) a(pos[t.row()], pos[t.col()]) += t.value();
  Eigen::VectorXcd x(n);
  for (std::size_t i = 0; i < dim; ++i) {
    if (keep[i]) x[pos[i]] = cplx(0.0, -1.0) * r.coeffs()[static_cast<Eigen::Index>(i)];
  }
  return qfi_solve<cplx>(a, x, opts);
}

double cfi(const ProbabilityFamily& family, double alpha, double d_alpha, double floor) {
  if (!(d_alpha > 0.0)) throw ParameterError("d_alpha must be positive");
  auto checked = [&](double a) {
    std::vector<double> p = family(a);
    double sum = 0.0;
    for (double v : p) {
      if (!(v >= -1e-12)) throw InputError("negative probability in family");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw InputError("probabilities sum to " + std::to_string(sum));
    }
    return p;
  };
  const auto p0 = checked(alpha);
  const auto pp = checked(alpha + d_alpha);
  const auto pm = checked(alpha - d_alpha);
  if (pp.size() != p0.size() || pm.size() != p0.size()) {
    throw InputError("outcome count changes with alpha");
  }
  double f = 0.0;
  for (std::size_t i = 0; i < p0.size(); ++i) {
    if (p0[i] < floor) continue;
    const double dp = (pp[i] - pm[i]) / (2.0 * d_alpha);
    f += dp * dp / p0[i];
  }
  return f;
}

std::vector<QfiRow> qfi_vs_max_order(int n_spins, const std::vector<int>& m_c_list,
                                     const std::vector<double>& p_list, WeightMode mode,
                                     const QfiSweepOptions& opts) {
  const BasisPtr basis = enumerate_basis(n_spins);
  std::vector<ClusterSpec> specs;
  for (int m : m_c_list) {
    ClusterSpec s{n_spins, m, mode, opts.gaussian_width, opts.mixing};
    s.validate();
    specs.push_back(s);
  }
  for (double p : p_list) {
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("dephasing strength must lie in [0, 1]");
  }
  const SymOperator iz = collective_z(basis);
  std::vector<QfiRow> rows(specs.size() * p_list.size());
  parallel_for(rows.size(), opts.threads, [&](std::size_t k) {
    const ClusterSpec& s = specs[k / p_list.size()];
    const double p = p_list[k % p_list.size()];
    const SymOperator rho = dephase(build_cluster(s, basis), p);
    QfiResult q = qfi(rho, iz, opts.qfi);
    rows[k] = {s.co_max, p, q.value, std::move(q.warnings)};
  });
  return rows;
}

double estimate_threshold(const std::vector<std::pair<double, double>>& samples,
                          double noise_rms) {
  std::set<double> distinct;
  for (const auto& s : samples) distinct.insert(s.first);
  if (distinct.size() < 2) throw InputError("need at least two distinct delta values");
  if (!(noise_rms >= 0.0)) throw ParameterError("noise_rms must be non-negative");
  const double n = static_cast<double>(samples.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : samples) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : samples) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  const double a = sxy / sxx;
  const double b = my - a * mx;
  const double scale = std::max(std::abs(my), 1e-300);
  if (!(a * (*distinct.rbegin() - *distinct.begin()) > 1e-12 * scale)) {
    throw NoSensitivityError("distortion does not grow with delta");
  }
  return std::max(0.0, (noise_rms - b) / a);
}

JitterSweepResult jitter_sweep(const SymOperator& seed, const JitterSweepSpec& spec) {
  if (spec.deltas.empty()) throw ParameterError("delta grid is empty");
  JitterSweepResult out;
  const std::vector<double> grid = phase_grid(spec.phase_points);
  const int N = seed.n_spins();

  auto spectrum_at = [&](double delta, std::vector<std::string>& warnings) {
    EvolutionConfig cfg = spec.evolution;
    cfg.jitter = delta;
    cfg.threads = 1;
    ScanResult scan = phase_scan(seed, cfg, grid);
    for (auto& w : scan.warnings) warnings.push_back(std::move(w));
    return spectrum_from_scan(scan, spec.suppress_zero, N).even_nonnegative();
  };

  std::vector<std::vector<std::string>> warn(spec.deltas.size() + 1);
  out.spectra.resize(spec.deltas.size());
  parallel_for(spec.deltas.size() + 1, spec.evolution.threads, [&](std::size_t k) {
    if (k == 0) {
      out.reference = spectrum_at(0.0, warn[0]);
    } else {
      out.spectra[k - 1] = spectrum_at(spec.deltas[k - 1], warn[k]);
    }
  });
  for (auto& ws : warn) {
    for (auto& w : ws) out.warnings.push_back(std::move(w));
  }
  for (std::size_t i = 0; i < spec.deltas.size(); ++i) {
    for (int m : spec.m_c) {
      out.rows.push_back(distortion_variance(out.reference, out.spectra[i], m, spec.deltas[i]));
    }
  }
  return out;
}

double linear_r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("need matching samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy * sxy / (sxx * syy);
}

}  // namespace mqc
