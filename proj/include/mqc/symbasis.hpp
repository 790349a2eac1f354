#pragma once

// Permutation-invariant operator basis T^h_{m,n} for N spin-1/2 sites.
//
// Single-site conventions: |0> is spin up (I_z = +1/2), sigma+ = |0><1|,
// sigma- = |1><0|. A basis element is the normalized sum of all distinct
// tensor-product arrangements of N(sigma+), N(sigma-), N(|0><0|) and
// N(|1><1|) single-site operators, relabelled as
//
//   m = N(sigma+) + N(|0><0|)   number of 0s in the ket
//   n = N(sigma-) + N(|0><0|)   number of 0s in the bra
//   h = N(sigma+) + N(sigma-)   number of off-diagonal sites
//
// Equivalently T^h_{m,n} = (1/k) sum |a><b| over computational strings a, b
// with #0(a) = m, #0(b) = n and Hamming distance h. The normalization k is
// the square root of the number of such pairs, so every element has unit
// Hilbert-Schmidt norm and the basis is orthonormal.

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace mqc {

struct Label {
  int m = 0;
  int n = 0;
  int h = 0;

  int order() const { return m - n; }
  auto operator<=>(const Label&) const = default;
};

class SymmetricBasis {
 public:
  static constexpr int kDefaultMaxSpins = 64;

  // Throws SizeError unless 1 <= n_spins <= max_spins.
  explicit SymmetricBasis(int n_spins, int max_spins = kDefaultMaxSpins);

  int n_spins() const { return n_spins_; }
  std::size_t size() const { return labels_.size(); }

  const std::vector<Label>& labels() const { return labels_; }
  const Label& label(std::size_t i) const { return labels_[i]; }

  bool contains(const Label& l) const;
  std::optional<std::size_t> find(const Label& l) const;
  // Throws LabelError when l is not a basis label.
  std::size_t index(const Label& l) const;

  // k(m, n, h); log_norm returns ln k.
  double norm(std::size_t i) const { return norms_[i]; }
  double log_norm(std::size_t i) const { return log_norms_[i]; }

  // Indices of labels with a given ket count m (rows) or bra count n (cols).
  std::span<const std::size_t> with_m(int m) const;
  std::span<const std::size_t> with_n(int n) const;

  // Expansion of T_a * T_b = delta_{n_a, m_b} sum_h chi^h T^h_{m_a, n_b}.
  // Throws LabelError for invalid labels; empty when n_a != m_b.
  std::map<int, double> structure_constants(const Label& a,
                                            const Label& b) const;

  // Hot-path variant over label indices; calls emit(result_index, chi) for
  // each non-zero term. Labels are assumed valid and n_a == m_b.
  template <class Emit>
  void for_each_product(std::size_t ia, std::size_t ib, Emit&& emit) const;

  double log_factorial(int k) const { return log_fact_[k]; }

 private:
  double chi(const Label& a, const Label& b, int h, double log_scale) const;
  double log_binomial(int n, int k) const {
    return log_fact_[n] - log_fact_[k] - log_fact_[n - k];
  }
  std::size_t offset(int m, int n) const { return offsets_[m * (n_spins_ + 1) + n]; }
  int h_min(int m, int n) const { return m > n ? m - n : n - m; }
  int h_max(int m, int n) const;

  int n_spins_;
  std::vector<Label> labels_;
  std::vector<double> norms_;
  std::vector<double> log_norms_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> by_m_;
  std::vector<std::size_t> by_m_start_;
  std::vector<std::size_t> by_n_;
  std::vector<std::size_t> by_n_start_;
  std::vector<double> log_fact_;
};

using BasisPtr = std::shared_ptr<const SymmetricBasis>;

// Shared immutable basis; labels in lexicographic (m, n, h) order.
BasisPtr enumerate_basis(int n_spins, int max_spins = SymmetricBasis::kDefaultMaxSpins);

// (N+1)(N+2)(N+3)/6
std::size_t expected_basis_size(int n_spins);

template <class Emit>
void SymmetricBasis::for_each_product(std::size_t ia, std::size_t ib,
                                      Emit&& emit) const {
  const Label& a = labels_[ia];
  const Label& b = labels_[ib];
  const int lo = std::max(h_min(a.m, b.n), a.h > b.h ? a.h - b.h : b.h - a.h);
  const int hi = std::min(h_max(a.m, b.n), a.h + b.h);
  const double log_scale = -log_norms_[ia] - log_norms_[ib];
  const std::size_t base = offset(a.m, b.n);
  const int h0 = h_min(a.m, b.n);
  for (int h = lo + ((lo - h0) & 1); h <= hi; h += 2) {
    const double c = chi(a, b, h, log_scale);
    if (c != 0.0) emit(base + static_cast<std::size_t>((h - h0) / 2), c);
  }
}

}  // namespace mqc
