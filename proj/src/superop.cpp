#include "mqc/superop.hpp"

#include "mqc/errors.hpp"

namespace mqc {

SuperOperatorMatrix::SuperOperatorMatrix(BasisPtr basis,
                                         const std::vector<Triplet>& entries,
                                         double sparse_fill)
    : basis_(std::move(basis)) {
  const Eigen::Index d = dim();
  Sparse s(d, d);
  s.setFromTriplets(entries.begin(), entries.end());
  s.prune(cplx(0.0));
  const double fill = d == 0 ? 0.0
                             : static_cast<double>(s.nonZeros()) /
                                   (static_cast<double>(d) * static_cast<double>(d));
  if (fill < sparse_fill) {
    storage_ = std::move(s);
  } else {
    storage_ = Dense(s);
  }
}

SuperOperatorMatrix::SuperOperatorMatrix(BasisPtr basis, Dense dense)
    : basis_(std::move(basis)), storage_(std::move(dense)) {
  const auto& m = std::get<Dense>(storage_);
  if (m.rows() != dim() || m.cols() != dim()) {
    throw IncompatibleError("superoperator dimension does not match basis");
  }
}

Eigen::VectorXcd SuperOperatorMatrix::apply(const Eigen::VectorXcd& v) const {
  return std::visit([&](const auto& m) -> Eigen::VectorXcd { return m * v; }, storage_);
}

SymOperator SuperOperatorMatrix::apply(const SymOperator& x) const {
  if (x.n_spins() != basis_->n_spins()) {
    throw IncompatibleError("superoperator applied to operator on another basis");
  }
  return SymOperator(basis_, apply(x.coeffs()));
}

SuperOperatorMatrix::Dense SuperOperatorMatrix::to_dense() const {
  if (const auto* s = std::get_if<Sparse>(&storage_)) return Dense(*s);
  return std::get<Dense>(storage_);
}

SuperOperatorMatrix::Sparse SuperOperatorMatrix::to_sparse() const {
  if (const auto* s = std::get_if<Sparse>(&storage_)) return *s;
  return std::get<Dense>(storage_).sparseView();
}

std::vector<SuperOperatorMatrix::Triplet> product_triplets(
    const SymOperator& a, double sign_left, double sign_right,
    const std::vector<bool>* keep_columns) {
  const SymmetricBasis& basis = a.basis();
  const int N = basis.n_spins();
  const auto& ac = a.coeffs();

  std::vector<std::vector<std::size_t>> by_n(N + 1);
  std::vector<std::vector<std::size_t>> by_m(N + 1);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (ac[static_cast<Eigen::Index>(i)] == 0.0) continue;
    by_n[basis.label(i).n].push_back(i);
    by_m[basis.label(i).m].push_back(i);
  }

  std::vector<SuperOperatorMatrix::Triplet> out;
  for (std::size_t col = 0; col < basis.size(); ++col) {
    if (keep_columns && !(*keep_columns)[col]) continue;
    const Label& x = basis.label(col);
    const auto c = static_cast<Eigen::Index>(col);
    if (sign_left != 0.0) {
      for (std::size_t ia : by_n[x.m]) {
        const cplx w = sign_left * ac[static_cast<Eigen::Index>(ia)];
        basis.for_each_product(ia, col, [&](std::size_t r, double chi) {
          out.emplace_back(static_cast<Eigen::Index>(r), c, w * chi);
        });
      }
    }
    if (sign_right != 0.0) {
      for (std::size_t ia : by_m[x.n]) {
        const cplx w = sign_right * ac[static_cast<Eigen::Index>(ia)];
        basis.for_each_product(col, ia, [&](std::size_t r, double chi) {
          out.emplace_back(static_cast<Eigen::Index>(r), c, w * chi);
        });
      }
    }
  }
  return out;
}

SuperOperatorMatrix left_mult_superop(const SymOperator& a) {
  return {a.basis_ptr(), product_triplets(a, 1.0, 0.0)};
}

SuperOperatorMatrix right_mult_superop(const SymOperator& a) {
  return {a.basis_ptr(), product_triplets(a, 0.0, 1.0)};
}

SuperOperatorMatrix commutator_superop(const SymOperator& a) {
  return {a.basis_ptr(), product_triplets(a, 1.0, -1.0)};
}

SuperOperatorMatrix anticommutator_superop(const SymOperator& a) {
  return {a.basis_ptr(), product_triplets(a, 1.0, 1.0)};
}

}  // namespace mqc
