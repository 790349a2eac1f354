#include "mqc/symbasis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mqc/errors.hpp"

namespace mqc {

namespace {

std::string label_str(const Label& l) {
  return "(" + std::to_string(l.m) + "," + std::to_string(l.n) + "," +
         std::to_string(l.h) + ")";
}

}  // namespace

std::size_t expected_basis_size(int n_spins) {
  const auto n = static_cast<std::size_t>(n_spins);
  return (n + 1) * (n + 2) * (n + 3) / 6;
}

SymmetricBasis::SymmetricBasis(int n_spins, int max_spins) : n_spins_(n_spins) {
  if (n_spins < 1 || n_spins > max_spins) {
    throw SizeError("n_spins must lie in [1, " + std::to_string(max_spins) +
                    "], got " + std::to_string(n_spins));
  }
  const int N = n_spins;
  log_fact_.resize(2 * N + 2);
  for (int k = 0; k < static_cast<int>(log_fact_.size()); ++k) {
    log_fact_[k] = std::lgamma(static_cast<double>(k) + 1.0);
  }

  labels_.reserve(expected_basis_size(N));
  offsets_.assign(static_cast<std::size_t>((N + 1) * (N + 1)), 0);
  for (int m = 0; m <= N; ++m) {
    for (int n = 0; n <= N; ++n) {
      offsets_[m * (N + 1) + n] = labels_.size();
      for (int h = h_min(m, n); h <= h_max(m, n); h += 2) {
        labels_.push_back({m, n, h});
      }
    }
  }

  norms_.reserve(labels_.size());
  log_norms_.reserve(labels_.size());
  for (const Label& l : labels_) {
    const int n_plus = (l.h + l.m - l.n) / 2;
    const int n_minus = (l.h - l.m + l.n) / 2;
    const int n_00 = l.m - n_plus;
    const int n_11 = N - n_plus - n_minus - n_00;
    const double log_count = log_fact_[N] - log_fact_[n_plus] -
                             log_fact_[n_minus] - log_fact_[n_00] -
                             log_fact_[n_11];
    log_norms_.push_back(0.5 * log_count);
    norms_.push_back(std::exp(0.5 * log_count));
  }

  // Counting-sort style buckets by m and by n.
  auto bucket = [&](auto key, std::vector<std::size_t>& items,
                    std::vector<std::size_t>& start) {
    start.assign(static_cast<std::size_t>(N + 2), 0);
    for (const Label& l : labels_) ++start[key(l) + 1];
    for (int i = 0; i <= N; ++i) start[i + 1] += start[i];
    items.resize(labels_.size());
    std::vector<std::size_t> fill(start.begin(), start.end() - 1);
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      items[fill[key(labels_[i])]++] = i;
    }
  };
  bucket([](const Label& l) { return l.m; }, by_m_, by_m_start_);
  bucket([](const Label& l) { return l.n; }, by_n_, by_n_start_);
}

int SymmetricBasis::h_max(int m, int n) const {
  return std::min(m + n, 2 * n_spins_ - m - n);
}

bool SymmetricBasis::contains(const Label& l) const {
  if (l.m < 0 || l.n < 0 || l.m > n_spins_ || l.n > n_spins_) return false;
  if (l.h < h_min(l.m, l.n) || l.h > h_max(l.m, l.n)) return false;
  return ((l.h - h_min(l.m, l.n)) & 1) == 0;
}

std::optional<std::size_t> SymmetricBasis::find(const Label& l) const {
  if (!contains(l)) return std::nullopt;
  return offset(l.m, l.n) + static_cast<std::size_t>((l.h - h_min(l.m, l.n)) / 2);
}

std::size_t SymmetricBasis::index(const Label& l) const {
  auto i = find(l);
  if (!i) {
    throw LabelError("label " + label_str(l) + " is not valid for N=" +
                     std::to_string(n_spins_));
  }
  return *i;
}

std::span<const std::size_t> SymmetricBasis::with_m(int m) const {
  if (m < 0 || m > n_spins_) return {};
  return {by_m_.data() + by_m_start_[m], by_m_start_[m + 1] - by_m_start_[m]};
}

std::span<const std::size_t> SymmetricBasis::with_n(int n) const {
  if (n < 0 || n > n_spins_) return {};
  return {by_n_.data() + by_n_start_[n], by_n_start_[n + 1] - by_n_start_[n]};
}

// Counts the intermediate strings b that connect a fixed pair (a, d) of the
// result label. Sites of (a, d) split into four classes by (a_i, d_i); x_ad is
// the number of sites in each class where b_i = 0. The three constraints
// #0(b) = n_a, ham(a, b) = h_a, ham(b, d) = h_b leave x00 free.
double SymmetricBasis::chi(const Label& a, const Label& b, int h,
                           double log_scale) const {
  const int N = n_spins_;
  const int m1 = a.m;
  const int n1 = a.n;
  const int n2 = b.n;
  const int c00 = (m1 + n2 - h) / 2;
  const int c01 = (h + m1 - n2) / 2;
  const int c10 = (h - m1 + n2) / 2;
  const int c11 = N - (m1 + n2 + h) / 2;
  const int p = (n1 + m1 - a.h) / 2;  // x00 + x01
  const int q = (n1 - m1 + a.h) / 2;  // x10 + x11
  const int r = (n1 + n2 - b.h) / 2;  // x00 + x10

  const int lo = std::max({0, p - c01, r - c10, r - q});
  const int hi = std::min({c00, p, r, c11 - q + r});
  if (lo > hi) return 0.0;

  const double log_result_norm = 0.5 * (log_fact_[N] - log_fact_[c00] -
                                        log_fact_[c01] - log_fact_[c10] -
                                        log_fact_[c11]);
  const double shift = log_result_norm + log_scale;
  double sum = 0.0;
  for (int x00 = lo; x00 <= hi; ++x00) {
    const int x01 = p - x00;
    const int x10 = r - x00;
    const int x11 = q - x10;
    sum += std::exp(log_binomial(c00, x00) + log_binomial(c01, x01) +
                    log_binomial(c10, x10) + log_binomial(c11, x11) + shift);
  }
  return sum;
}

std::map<int, double> SymmetricBasis::structure_constants(const Label& a,
                                                          const Label& b) const {
  const std::size_t ia = index(a);
  const std::size_t ib = index(b);
  std::map<int, double> out;
  if (a.n != b.m) return out;
  for_each_product(ia, ib, [&](std::size_t ir, double c) {
    out[labels_[ir].h] = c;
  });
  return out;
}

BasisPtr enumerate_basis(int n_spins, int max_spins) {
  return std::make_shared<const SymmetricBasis>(n_spins, max_spins);
}

}  // namespace mqc
