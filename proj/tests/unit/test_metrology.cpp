#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "mqc/errors.hpp"
#include "mqc/metrology.hpp"

using namespace mqc;

namespace {

CoherenceSpectrum spectrum(std::map<int, double> v) {
  CoherenceSpectrum s;
  s.intensities = std::move(v);
  return s;
}

CoherenceSpectrum gaussian(double fwhh, int qmax, double amp = 1.0) {
  CoherenceSpectrum s;
  for (int q = -qmax; q <= qmax; q += 2) {
    s.intensities[q] = amp * std::exp(-4.0 * std::numbers::ln2 * q * q / (fwhh * fwhh));
  }
  return s;
}

}  // namespace

TEST_CASE("distortion variance arithmetic") {
  const auto s0 = spectrum({{0, 1.0}, {2, 0.5}});
  const auto sd = spectrum({{0, 0.8}, {2, 0.1}});
  CHECK(distortion_variance(s0, sd, 2).value == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(distortion_variance(s0, s0, 2).value == 0.0);
  CHECK(distortion_variance(s0, sd, 0).value == doctest::Approx(0.04));
  CHECK_THROWS_AS(distortion_variance(s0, sd, 4), RangeError);
  CHECK_THROWS_AS(distortion_variance(s0, sd, 1), RangeError);
  CHECK_THROWS_AS(distortion_variance(s0, sd, -2), RangeError);
}

TEST_CASE("distortion variance is symmetric and quadratic in the deviation") {
  const auto s0 = spectrum({{0, 0.4}, {2, 0.3}, {4, 0.2}, {6, 0.1}});
  const auto sd = spectrum({{0, 0.5}, {2, 0.25}, {4, 0.15}, {6, 0.1}});
  const double d = distortion_variance(s0, sd, 6).value;
  CHECK(distortion_variance(sd, s0, 6).value == doctest::Approx(d));
  CoherenceSpectrum half = s0;
  for (auto& [q, v] : half.intensities) v += 0.5 * (sd.at(q) - s0.at(q));
  CHECK(distortion_variance(s0, half, 6).value == doctest::Approx(0.25 * d));
}

TEST_CASE("Gaussian fit recovers the width") {
  const ClusterFit f = gaussian_fit(gaussian(20.0, 60, 0.3));
  CHECK(std::abs(f.fwhh - 20.0) / 20.0 < 1e-3);
  CHECK(f.residual < 1e-10);
  CHECK(f.amplitude == doctest::Approx(0.3));
  CHECK(f.n_cl == doctest::Approx(f.fwhh * f.fwhh / (4 * std::numbers::ln2)));
  const ClusterFit g = gaussian_fit(gaussian(7.5, 20), true);
  CHECK(g.fwhh == doctest::Approx(7.5).epsilon(1e-8));
}

TEST_CASE("cluster size identities") {
  CHECK(cluster_size_from_fwhh(std::sqrt(4 * std::numbers::ln2)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(cluster_size_from_fwhh(52.7) - 1002.0) < 0.5);
}

TEST_CASE("degenerate spectra cannot be fitted") {
  CHECK_THROWS_AS(gaussian_fit(spectrum({{0, 1.0}})), FitError);
  CHECK_THROWS_AS(gaussian_fit(spectrum({{0, 1.0}, {2, 0.0}, {4, 0.0}})), FitError);
}

TEST_CASE("qfi of simple states") {
  const auto b = enumerate_basis(5);
  CHECK(qfi(maximally_mixed(b), collective_z(b)).value == doctest::Approx(0.0));
  for (int n = 2; n <= 6; ++n) {
    const auto bn = enumerate_basis(n);
    CHECK(qfi(ghz_state(bn), collective_z(bn)).value == doctest::Approx(n * n).epsilon(1e-10));
  }
  const auto b1 = enumerate_basis(1);
  SymOperator plus(b1);
  for (std::size_t i = 0; i < plus.size(); ++i) {
    plus.coeffs()[static_cast<Eigen::Index>(i)] = 0.5 * b1->norm(i);
  }
  CHECK(plus.trace().real() == doctest::Approx(1.0));
  CHECK(qfi(plus, collective_z(b1)).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("qfi agrees with the spectral formula") {
  std::mt19937_64 rng(41);
  for (int n = 2; n <= 6; ++n) {
    const auto b = enumerate_basis(n);
    for (int k = 0; k < 3; ++k) {
      const SymOperator rho = testing::random_state(b, rng);
      const SymOperator g = testing::random_hermitian(b, rng);
      const double fast = qfi(rho, g).value;
      const double exact = oracle::qfi_exact(oracle::embed(rho), oracle::embed(g));
      CHECK(fast == doctest::Approx(exact).epsilon(1e-6));
    }
    const SymOperator c = dephase(build_cluster({n, n - n % 2, WeightMode::Equal}, b), 0.3);
    const double fc = qfi(c, collective_z(b)).value;
    CHECK(fc == doctest::Approx(oracle::qfi_exact(oracle::embed(c), oracle::collective(n, spin::iz())))
                    .epsilon(1e-6));
  }
}

TEST_CASE("qfi is invariant under z rotations") {
  std::mt19937_64 rng(43);
  const auto b = enumerate_basis(5);
  const SymOperator rho = testing::random_state(b, rng);
  const double f0 = qfi(rho, collective_z(b)).value;
  CHECK(qfi(rotate_z(rho, 0.77), collective_z(b)).value == doctest::Approx(f0).epsilon(1e-8));
}

TEST_CASE("qfi rejects non-Hermitian input") {
  std::mt19937_64 rng(47);
  const auto b = enumerate_basis(3);
  CHECK_THROWS_AS(qfi(testing::random_operator(b, rng), collective_z(b)), InputError);
  CHECK_THROWS_AS(qfi(maximally_mixed(b), testing::random_operator(b, rng)), InputError);
}

TEST_CASE("classical Fisher information") {
  auto bern = [](double a) { return std::vector<double>{a, 1.0 - a}; };
  CHECK(cfi(bern, 0.5, 1e-4) == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(cfi(bern, 0.2, 1e-4) == doctest::Approx(1.0 / (0.2 * 0.8)).epsilon(1e-6));
  auto flat = [](double) { return std::vector<double>{0.25, 0.75}; };
  CHECK(cfi(flat, 0.3, 1e-3) == 0.0);
  auto bad = [](double) { return std::vector<double>{0.5, 0.6}; };
  CHECK_THROWS_AS(cfi(bad, 0.3, 1e-3), InputError);
  auto negative = [](double) { return std::vector<double>{-0.5, 1.5}; };
  CHECK_THROWS_AS(cfi(negative, 0.3, 1e-3), InputError);
}

TEST_CASE("classical information stays below the quantum bound") {
  // z-phase encoding on a GHZ state, read out in the x basis of the
  // two-spin parity.
  const auto b = enumerate_basis(2);
  const SymOperator ghz = ghz_state(b);
  const auto x1 = oracle::site_operator(2, 0, 2.0 * spin::ix());
  const auto x2 = oracle::site_operator(2, 1, 2.0 * spin::ix());
  const oracle::Mat parity = x1 * x2;
  auto family = [&](double a) {
    const oracle::Mat rho = oracle::embed(rotate_z(ghz, a));
    const double e = (parity * rho).trace().real();
    return std::vector<double>{(1.0 + e) / 2.0, (1.0 - e) / 2.0};
  };
  const double fc = cfi(family, 0.3, 1e-5);
  const double fq = qfi(ghz, collective_z(b)).value;
  CHECK(fc <= fq + 1e-6);
  CHECK(fc == doctest::Approx(4.0).epsilon(1e-5));
}

TEST_CASE("threshold estimate") {
  CHECK(estimate_threshold({{0.0, 0.0}, {0.1, 0.2}, {0.2, 0.4}}, 0.1) == doctest::Approx(0.05));
  CHECK(estimate_threshold({{0.0, 0.5}, {0.1, 0.7}}, 0.1) == 0.0);
  CHECK_THROWS_AS(estimate_threshold({{0.0, 0.1}, {0.1, 0.1}}, 0.05), NoSensitivityError);
  CHECK_THROWS_AS(estimate_threshold({{0.0, 0.3}, {0.1, 0.1}}, 0.05), NoSensitivityError);
  CHECK_THROWS_AS(estimate_threshold({{0.1, 0.1}, {0.1, 0.2}}, 0.05), InputError);
  const std::vector<std::pair<double, double>> line{{0.0, 0.0}, {0.1, 0.3}, {0.2, 0.6}};
  CHECK(estimate_threshold(line, 0.05) < estimate_threshold(line, 0.1));
}

TEST_CASE("qfi sweep edge cases") {
  const auto rows = qfi_vs_max_order(8, {2, 4, 6, 8}, {1.0}, WeightMode::Equal);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) CHECK(std::abs(r.qfi) < 1e-9);
  const auto clean = qfi_vs_max_order(8, {2, 4, 6, 8}, {0.0}, WeightMode::Equal);
  for (std::size_t i = 1; i < clean.size(); ++i) CHECK(clean[i].qfi >= clean[i - 1].qfi - 1e-12);
  const auto par = qfi_vs_max_order(8, {2, 4, 6, 8}, {0.0, 0.5}, WeightMode::Gaussian, {{}, 1.0, {}, 4});
  const auto seq = qfi_vs_max_order(8, {2, 4, 6, 8}, {0.0, 0.5}, WeightMode::Gaussian);
  for (std::size_t i = 0; i < par.size(); ++i) CHECK(par[i].qfi == seq[i].qfi);
  CHECK_THROWS_AS(qfi_vs_max_order(8, {3}, {0.0}, WeightMode::Equal), SpecError);
}

TEST_CASE("jitter sweep starts at zero and grows with delta") {
  const auto b = enumerate_basis(8);
  JitterSweepSpec spec;
  spec.evolution.loops_prepare = spec.evolution.loops_reverse = 4;
  spec.evolution.cycle_time = 0.5;
  spec.deltas = {0.0, 0.05, 0.1, 0.2};
  spec.m_c = {4, 8};
  spec.phase_points = 61;
  const auto r = jitter_sweep(thermal_state(b), spec);
  REQUIRE(r.rows.size() == 8);
  CHECK(r.rows[0].value < 1e-20);
  CHECK(r.rows[1].value < 1e-20);
  for (std::size_t i = 2; i < r.rows.size(); i += 2) CHECK(r.rows[i].value > r.rows[i - 2].value);
}

TEST_CASE("linear R squared") {
  CHECK(linear_r_squared({0, 1, 2, 3}, {1, 3, 5, 7}) == doctest::Approx(1.0));
  CHECK(linear_r_squared({0, 1, 2, 3}, {1, 1, 1, 1}) == 0.0);
}
