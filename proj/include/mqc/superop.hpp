#pragma once

#include <variant>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "mqc/sym_operator.hpp"

namespace mqc {

// Linear map on the symmetric Liouville space, M * vec(x). Stored sparse
// when the fill fraction is below the threshold, dense otherwise.
class SuperOperatorMatrix {
 public:
  using Sparse = Eigen::SparseMatrix<cplx>;
  using Dense = Eigen::MatrixXcd;
  using Triplet = Eigen::Triplet<cplx>;

  static constexpr double kSparseFill = 0.10;

  SuperOperatorMatrix(BasisPtr basis, const std::vector<Triplet>& entries,
                      double sparse_fill = kSparseFill);
  SuperOperatorMatrix(BasisPtr basis, Dense dense);

  const BasisPtr& basis_ptr() const { return basis_; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(basis_->size()); }
  bool is_sparse() const { return std::holds_alternative<Sparse>(storage_); }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
  SymOperator apply(const SymOperator& x) const;

  Dense to_dense() const;
  // Converts dense storage when necessary.
  Sparse to_sparse() const;

 private:
  BasisPtr basis_;
  std::variant<Sparse, Dense> storage_;
};

// x -> a x, x -> x a, x -> [a, x], x -> {a, x}
SuperOperatorMatrix left_mult_superop(const SymOperator& a);
SuperOperatorMatrix right_mult_superop(const SymOperator& a);
SuperOperatorMatrix commutator_superop(const SymOperator& a);
SuperOperatorMatrix anticommutator_superop(const SymOperator& a);

// Triplet builders shared with the QFI assembly: sign_left * (a x) +
// sign_right * (x a), restricted to columns for which keep(col) holds.
std::vector<SuperOperatorMatrix::Triplet> product_triplets(
    const SymOperator& a, double sign_left, double sign_right,
    const std::vector<bool>* keep_columns = nullptr);

}  // namespace mqc
