#include "mqc/oracle.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "mqc/errors.hpp"
#include "mqc/parallel.hpp"

namespace mqc::oracle {

namespace {

using Index = Eigen::Index;

int zeros(std::uint32_t a, int n) { return n - std::popcount(a); }
int bit(std::uint32_t a, int i) { return static_cast<int>((a >> i) & 1U); }

Mat pair_operator(int n, int i, int j, const Matrix2c& a, const Matrix2c& b) {
  const Index dim = Index{1} << n;
  Mat m = Mat::Zero(dim, dim);
  for (std::uint32_t col = 0; col < static_cast<std::uint32_t>(dim); ++col) {
    const int bi = bit(col, i), bj = bit(col, j);
    for (int vi = 0; vi < 2; ++vi) {
      for (int vj = 0; vj < 2; ++vj) {
        const cplx w = a(vi, bi) * b(vj, bj);
        if (w == 0.0) continue;
        std::uint32_t row = col;
        row = (row & ~(1U << i)) | (static_cast<std::uint32_t>(vi) << i);
        row = (row & ~(1U << j)) | (static_cast<std::uint32_t>(vj) << j);
        m(row, col) += w;
      }
    }
  }
  return m;
}

// Tensor power u x u x ... x u.
Mat product_unitary(int n, const Matrix2c& u) {
  const Index dim = Index{1} << n;
  Mat m(dim, dim);
  for (std::uint32_t r = 0; r < static_cast<std::uint32_t>(dim); ++r) {
    for (std::uint32_t c = 0; c < static_cast<std::uint32_t>(dim); ++c) {
      cplx v = 1.0;
      for (int i = 0; i < n && v != 0.0; ++i) v *= u(bit(r, i), bit(c, i));
      m(r, c) = v;
    }
  }
  return m;
}

Matrix2c axis_matrix(Axis axis) {
  switch (axis) {
    case Axis::PlusX: return spin::ix();
    case Axis::MinusX: return -spin::ix();
    case Axis::PlusY: return spin::iy();
    case Axis::MinusY: return -spin::iy();
  }
  return spin::ix();
}

// exp(-i theta a) for a single-site operator a with a^2 = 1/4.
Matrix2c site_rotation(const Matrix2c& a, double theta) {
  return std::cos(theta / 2) * Matrix2c::Identity() -
         cplx(0.0, 2.0 * std::sin(theta / 2)) * a;
}

// Applies exp(-i theta a) on every site of a state vector.
void rotate_state(Eigen::VectorXcd& psi, int n, const Matrix2c& u) {
  const Index dim = psi.size();
  for (int i = 0; i < n; ++i) {
    const Index stride = Index{1} << i;
    for (Index base = 0; base < dim; ++base) {
      if (base & stride) continue;
      const cplx x0 = psi[base], x1 = psi[base | stride];
      psi[base] = u(0, 0) * x0 + u(0, 1) * x1;
      psi[base | stride] = u(1, 0) * x0 + u(1, 1) * x1;
    }
  }
}

struct Eig {
  Eigen::VectorXd values;
  Mat vectors;

  explicit Eig(const Mat& h) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()));
    values = es.eigenvalues();
    vectors = es.eigenvectors();
  }

  Mat exp_minus_i(double t) const {
    Eigen::VectorXcd ph(values.size());
    for (Index k = 0; k < values.size(); ++k) ph[k] = std::polar(1.0, -values[k] * t);
    return vectors * ph.asDiagonal() * vectors.adjoint();
  }
};

Mat hamiltonian_axis(const SpinSystem& sys, int axis) {
  sys.validate();
  const int n = sys.n_spins;
  const Matrix2c ops[3] = {spin::ix(), spin::iy(), spin::iz()};
  const Index dim = Index{1} << n;
  Mat h = Mat::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double d = sys.couplings(i, j);
      if (i == j || d == 0.0) continue;
      for (int a = 0; a < 3; ++a) {
        const double w = a == axis ? d : -0.5 * d;
        h += w * pair_operator(n, i, j, ops[a], ops[a]);
      }
    }
  }
  return h;
}

}  // namespace

void check_size(int n_spins) {
  if (n_spins < 1 || n_spins > kMaxSpins) {
    throw SizeError("exact simulation supports 1.." + std::to_string(kMaxSpins) +
                    " spins, got " + std::to_string(n_spins));
  }
}

SpinSystem SpinSystem::uniform(int n_spins, double d) {
  check_size(n_spins);
  SpinSystem s;
  s.n_spins = n_spins;
  s.couplings = Eigen::MatrixXd::Constant(n_spins, n_spins, d);
  s.couplings.diagonal().setZero();
  return s;
}

void SpinSystem::validate() const {
  check_size(n_spins);
  if (couplings.rows() != n_spins || couplings.cols() != n_spins) {
    throw ParameterError("coupling matrix must be n_spins x n_spins");
  }
  if ((couplings - couplings.transpose()).cwiseAbs().maxCoeff() > 0.0) {
    throw ParameterError("coupling matrix must be symmetric");
  }
  if (couplings.diagonal().cwiseAbs().maxCoeff() != 0.0) {
    throw ParameterError("coupling matrix must have a zero diagonal");
  }
}

Mat site_operator(int n_spins, int site, const Matrix2c& op) {
  check_size(n_spins);
  const Index dim = Index{1} << n_spins;
  Mat m = Mat::Zero(dim, dim);
  for (std::uint32_t col = 0; col < static_cast<std::uint32_t>(dim); ++col) {
    const int b = bit(col, site);
    for (int v = 0; v < 2; ++v) {
      const cplx w = op(v, b);
      if (w == 0.0) continue;
      const std::uint32_t row = (col & ~(1U << site)) | (static_cast<std::uint32_t>(v) << site);
      m(row, col) += w;
    }
  }
  return m;
}

Mat collective(int n_spins, const Matrix2c& op) {
  check_size(n_spins);
  const Index dim = Index{1} << n_spins;
  Mat m = Mat::Zero(dim, dim);
  for (int i = 0; i < n_spins; ++i) m += site_operator(n_spins, i, op);
  return m;
}

Mat h_dd(const SpinSystem& sys) {
  sys.validate();
  const int n = sys.n_spins;
  const Index dim = Index{1} << n;
  Mat h = Mat::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double d = sys.couplings(i, j);
      if (i == j || d == 0.0) continue;
      h += 2.0 * d * pair_operator(n, i, j, spin::iz(), spin::iz());
      h -= d * pair_operator(n, i, j, spin::ix(), spin::ix());
      h -= d * pair_operator(n, i, j, spin::iy(), spin::iy());
    }
  }
  return h;
}

Mat h_x(const SpinSystem& sys) { return hamiltonian_axis(sys, 0); }
Mat h_y(const SpinSystem& sys) { return hamiltonian_axis(sys, 1); }
Mat h_z(const SpinSystem& sys) { return hamiltonian_axis(sys, 2); }

Mat embed(const SymOperator& op) {
  const SymmetricBasis& basis = op.basis();
  const int n = basis.n_spins();
  check_size(n);
  const Index dim = Index{1} << n;
  Mat m(dim, dim);
  for (std::uint32_t a = 0; a < static_cast<std::uint32_t>(dim); ++a) {
    for (std::uint32_t b = 0; b < static_cast<std::uint32_t>(dim); ++b) {
      const std::size_t l = basis.index({zeros(a, n), zeros(b, n), std::popcount(a ^ b)});
      m(a, b) = op.coeffs()[static_cast<Index>(l)] / basis.norm(l);
    }
  }
  return m;
}

SymOperator project(const Mat& m, const BasisPtr& basis) {
  const int n = basis->n_spins();
  check_size(n);
  const Index dim = Index{1} << n;
  if (m.rows() != dim || m.cols() != dim) {
    throw IncompatibleError("matrix dimension does not match the basis");
  }
  SymOperator out(basis);
  for (std::uint32_t a = 0; a < static_cast<std::uint32_t>(dim); ++a) {
    for (std::uint32_t b = 0; b < static_cast<std::uint32_t>(dim); ++b) {
      const std::size_t l = basis->index({zeros(a, n), zeros(b, n), std::popcount(a ^ b)});
      out.coeffs()[static_cast<Index>(l)] += m(a, b);
    }
  }
  for (std::size_t l = 0; l < basis->size(); ++l) {
    out.coeffs()[static_cast<Index>(l)] /= basis->norm(l);
  }
  return out;
}

std::map<int, double> structure_constants(const BasisPtr& basis, const Label& a,
                                          const Label& b) {
  const Mat prod = embed(SymOperator::element(basis, a)) * embed(SymOperator::element(basis, b));
  const SymOperator p = project(prod, basis);
  std::map<int, double> out;
  for (std::size_t l = 0; l < basis->size(); ++l) {
    const cplx c = p.coeffs()[static_cast<Index>(l)];
    if (std::abs(c) > 1e-14) out[basis->label(l).h] += c.real();
  }
  return out;
}

Mat rotate_z(const Mat& rho, double phi) {
  const Index dim = rho.rows();
  const int n = std::countr_zero(static_cast<std::uint64_t>(dim));
  const Mat u = product_unitary(n, site_rotation(spin::iz(), phi));
  return u * rho * u.adjoint();
}

Mat dephase_kraus(const Mat& rho, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("dephasing strength must lie in [0, 1]");
  const Index dim = rho.rows();
  const int n = std::countr_zero(static_cast<std::uint64_t>(dim));
  Matrix2c e1, e2;
  e1 << 1.0, 0.0, 0.0, std::sqrt(1.0 - p);
  e2 << 0.0, 0.0, 0.0, std::sqrt(p);
  Mat out = rho;
  for (int i = 0; i < n; ++i) {
    const Mat k1 = site_operator(n, i, e1);
    const Mat k2 = site_operator(n, i, e2);
    out = k1 * out * k1.adjoint() + k2 * out * k2.adjoint();
  }
  return out;
}

Mat evolve_unitary(const Mat& rho, const Mat& h, double t) {
  const Mat u = Eig(h).exp_minus_i(t);
  return u * rho * u.adjoint();
}

Mat evolve_lindblad(const Mat& rho, const Mat& h, const Mat& v, double kappa, double t) {
  auto gen = [&](const Mat& x) -> Mat {
    Mat y = cplx(0.0, -1.0) * (h * x - x * h);
    if (kappa > 0.0) {
      const Mat vx = v * x - x * v;
      y -= kappa * (v * vx - vx * v);
    }
    return y;
  };
  // Spectral norms: ||[H, .]|| <= 2 ||H||, ||[V, [V, .]]|| <= 4 ||V||^2.
  auto spectral = [](const Mat& m) {
    return Eigen::SelfAdjointEigenSolver<Mat>(m, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff();
  };
  const double nv = kappa > 0.0 ? spectral(v) : 0.0;
  const double bound = 2.0 * spectral(h) + 4.0 * kappa * nv * nv;
  const long steps = std::max(1L, static_cast<long>(std::ceil(t * bound)));
  const double dt = t / static_cast<double>(steps);
  Mat x = rho;
  for (long s = 0; s < steps; ++s) {
    Mat term = x;
    Mat sum = x;
    for (int k = 1; k < 80; ++k) {
      term = gen(term) * (dt / k);
      sum += term;
      if (term.norm() <= 1e-18 * sum.norm()) break;
    }
    x = std::move(sum);
  }
  return x;
}

double qfi_exact(const Mat& rho, const Mat& g) {
  if ((rho - rho.adjoint()).norm() > 1e-10 * std::max(1.0, rho.norm())) {
    throw InputError("density matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  const auto& l = es.eigenvalues();
  if (l.minCoeff() < -1e-10) throw InputError("density matrix is not positive");
  const Mat gt = es.eigenvectors().adjoint() * g * es.eigenvectors();
  double f = 0.0;
  for (Index i = 0; i < l.size(); ++i) {
    for (Index j = 0; j < l.size(); ++j) {
      const double s = l[i] + l[j];
      if (s < 1e-12) continue;
      const double d = l[i] - l[j];
      f += d * d / s * std::norm(gt(i, j));
    }
  }
  return 2.0 * f;
}

double trace_distance(const Mat& a, const Mat& b) {
  const Mat d = a - b;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

std::vector<double> coherence_spectrum(const Mat& rho) {
  const Index dim = rho.rows();
  const int n = std::countr_zero(static_cast<std::uint64_t>(dim));
  std::vector<double> s(static_cast<std::size_t>(2 * n + 1), 0.0);
  for (std::uint32_t a = 0; a < static_cast<std::uint32_t>(dim); ++a) {
    for (std::uint32_t b = 0; b < static_cast<std::uint32_t>(dim); ++b) {
      const int q = zeros(a, n) - zeros(b, n);
      s[static_cast<std::size_t>(q + n)] += std::norm(rho(a, b));
    }
  }
  return s;
}

int PulseSequence::pulse_count() const {
  int c = 0;
  for (const auto& e : events) c += e.is_pulse ? 1 : 0;
  return c;
}

double PulseSequence::free_time() const {
  double t = 0.0;
  for (const auto& e : events) {
    if (!e.is_pulse) t += e.duration;
  }
  return t;
}

double PulseSequence::cycle_time() const {
  double t = 0.0;
  for (const auto& e : events) t += e.duration;
  return t;
}

PulseSequence eight_pulse_cycle(double delta, double tau_pi2, bool delta_pulses) {
  if (!(delta > 0.0) || !(tau_pi2 > 0.0)) {
    throw ParameterError("Delta and tau_pi2 must be positive");
  }
  PulseSequence seq;
  seq.delta = delta;
  seq.tau_pi2 = tau_pi2;
  seq.delta_pulses = delta_pulses;
  seq.delta_prime = delta_pulses ? 2.0 * delta : 2.0 * delta + tau_pi2;
  const double width = delta_pulses ? 0.0 : tau_pi2;
  const double gaps[9] = {delta / 2, seq.delta_prime, delta, seq.delta_prime, delta,
                          seq.delta_prime, delta, seq.delta_prime, delta / 2};
  for (int k = 0; k < 9; ++k) {
    seq.events.push_back({false, gaps[k], Axis::PlusX, 0.0});
    if (k < 8) {
      seq.events.push_back(
          {true, width, k < 4 ? Axis::PlusX : Axis::MinusX, std::numbers::pi / 2});
    }
  }
  return seq;
}

TogglingAverage toggling_average(const SpinSystem& sys, const PulseSequence& seq,
                                 const std::vector<double>& eps) {
  const int np = seq.pulse_count();
  if (static_cast<int>(eps.size()) != np) {
    throw ParameterError("need one flip-angle error per pulse");
  }
  const Mat h = h_dd(sys);
  const int n = sys.n_spins;
  const Index dim = h.rows();
  TogglingAverage out{Mat::Zero(dim, dim), Mat::Zero(dim, dim), Mat::Zero(dim, dim)};
  const double total_free = seq.free_time();

  // Frame unitary U = P_{k-1} ... P_1 and the toggled H~ = U^dagger H U.
  Mat u = Mat::Identity(dim, dim);
  double quarter_turns = 0.0;
  int pulse = 0;
  for (const auto& e : seq.events) {
    if (e.is_pulse) {
      const double theta = e.angle + eps[static_cast<std::size_t>(pulse)];
      u = product_unitary(n, site_rotation(axis_matrix(e.axis), theta)) * u;
      const double sign = e.axis == Axis::MinusX || e.axis == Axis::MinusY ? -1.0 : 1.0;
      quarter_turns += sign * e.angle / (std::numbers::pi / 2);
      ++pulse;
      continue;
    }
    const double w = e.duration / total_free;
    const Mat ht = w * (u.adjoint() * h * u);
    out.total += ht;
    const long turns = std::lround(quarter_turns);
    (turns % 2 != 0 ? out.y_frame_part : out.z_frame_part) += ht;
  }
  return out;
}

Mat cycle_propagator(const SpinSystem& sys, const PulseSequence& seq,
                     const std::vector<double>& widths) {
  if (static_cast<int>(widths.size()) != seq.pulse_count()) {
    throw ParameterError("need one width per pulse");
  }
  const Mat h = h_dd(sys);
  const Eig eh(h);
  const int n = sys.n_spins;
  Mat u = Mat::Identity(h.rows(), h.cols());
  int pulse = 0;
  for (const auto& e : seq.events) {
    if (!e.is_pulse) {
      u = eh.exp_minus_i(e.duration) * u;
      continue;
    }
    const double w = widths[static_cast<std::size_t>(pulse++)];
    if (seq.delta_pulses) {
      const double theta = e.angle * w / seq.tau_pi2;
      u = product_unitary(n, site_rotation(axis_matrix(e.axis), theta)) * u;
    } else {
      const double omega = e.angle / seq.tau_pi2;
      const Mat hp = h + omega * collective(n, axis_matrix(e.axis));
      u = Eig(hp).exp_minus_i(w) * u;
    }
  }
  return u;
}

Mat monte_carlo_jitter(const Mat& rho0, const SpinSystem& sys, const PulseSequence& seq,
                       const JitterModel& jitter, int n_cycles, int n_samples,
                       const MonteCarloOptions& opts) {
  sys.validate();
  if (n_samples < 1) throw ParameterError("need at least one sample");
  if (n_cycles < 0) throw ParameterError("cycle count must be non-negative");
  if (!(jitter.amplitude >= 0.0)) throw ParameterError("jitter amplitude must be non-negative");
  const Index dim = Index{1} << sys.n_spins;
  if (rho0.rows() != dim || rho0.cols() != dim) {
    throw IncompatibleError("state dimension does not match the spin system");
  }
  for (const auto& e : seq.events) {
    if (e.is_pulse && opts.frame_correction &&
        (e.axis == Axis::PlusY || e.axis == Axis::MinusY)) {
      throw ParameterError("frame correction supports x pulses only");
    }
  }
  const int n = sys.n_spins;
  const int np = seq.pulse_count();

  // Pure-state decomposition of the initial state.
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho0 + rho0.adjoint()));
  std::vector<double> weights;
  std::vector<Eigen::VectorXcd> states;
  for (Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double w = es.eigenvalues()[k];
    if (std::abs(w) < 1e-14) continue;
    weights.push_back(w);
    states.push_back(es.eigenvectors().col(k));
  }

  const Mat h = h_dd(sys);
  const Eig eh(h);
  std::vector<Mat> delay_u;
  for (const auto& e : seq.events) {
    delay_u.push_back(e.is_pulse ? Mat() : eh.exp_minus_i(e.duration));
  }
  std::vector<Eig> pulse_eig;
  if (!seq.delta_pulses) {
    for (const auto& e : seq.events) {
      if (!e.is_pulse) continue;
      const double omega = e.angle / seq.tau_pi2;
      pulse_eig.emplace_back(h + omega * collective(n, axis_matrix(e.axis)));
    }
  }

  auto draw_widths = [&](std::size_t pair_index, bool mirror) {
    std::seed_seq ss{static_cast<std::uint32_t>(jitter.seed),
                     static_cast<std::uint32_t>(jitter.seed >> 32),
                     static_cast<std::uint32_t>(pair_index),
                     static_cast<std::uint32_t>(pair_index >> 32)};
    std::mt19937_64 rng(ss);
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    std::vector<double> w(static_cast<std::size_t>(np) * static_cast<std::size_t>(n_cycles));
    for (double& x : w) {
      const double u = unif(rng);
      x = seq.tau_pi2 + jitter.amplitude * (mirror ? -u : u);
    }
    return w;
  };

  auto run_sample = [&](std::size_t s) -> Mat {
    const bool mirror = opts.antithetic && (s % 2 == 1);
    const std::size_t draw_index = opts.antithetic ? s / 2 : s;
    const std::vector<double> widths = draw_widths(draw_index, mirror);
    std::vector<Eigen::VectorXcd> psi = states;
    for (int c = 0; c < n_cycles; ++c) {
      double net = 0.0;
      int pulse = 0;
      for (std::size_t ev = 0; ev < seq.events.size(); ++ev) {
        const auto& e = seq.events[ev];
        if (!e.is_pulse) {
          for (auto& v : psi) v = delay_u[ev] * v;
          continue;
        }
        const double w = widths[static_cast<std::size_t>(c * np + pulse)];
        const double theta = e.angle * w / seq.tau_pi2;
        net += (e.axis == Axis::MinusX ? -1.0 : 1.0) * (theta - e.angle);
        if (seq.delta_pulses) {
          const Matrix2c r = site_rotation(axis_matrix(e.axis), theta);
          for (auto& v : psi) rotate_state(v, n, r);
        } else {
          const Mat u = pulse_eig[static_cast<std::size_t>(pulse)].exp_minus_i(w);
          for (auto& v : psi) v = u * v;
        }
        ++pulse;
      }
      if (opts.frame_correction && net != 0.0) {
        const Matrix2c r = site_rotation(spin::ix(), -net);
        for (auto& v : psi) rotate_state(v, n, r);
      }
    }
    Mat rho = Mat::Zero(dim, dim);
    for (std::size_t k = 0; k < psi.size(); ++k) {
      rho.noalias() += weights[k] * psi[k] * psi[k].adjoint();
    }
    return rho;
  };

  // Fixed blocks summed in index order keep the reduction independent of
  // the worker count.
  constexpr std::size_t kBlock = 64;
  const std::size_t total = static_cast<std::size_t>(n_samples);
  const std::size_t blocks = (total + kBlock - 1) / kBlock;
  std::vector<Mat> partial(blocks);
  parallel_for(blocks, opts.threads, [&](std::size_t b) {
    Mat acc = Mat::Zero(dim, dim);
    const std::size_t end = std::min(total, (b + 1) * kBlock);
    for (std::size_t s = b * kBlock; s < end; ++s) acc += run_sample(s);
    partial[b] = std::move(acc);
  });
  Mat sum = Mat::Zero(dim, dim);
  for (const auto& p : partial) sum += p;
  return sum / static_cast<double>(n_samples);
}

}  // namespace mqc::oracle
