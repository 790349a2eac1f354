#pragma once

#include <complex>

#include <Eigen/Core>

#include "mqc/symbasis.hpp"

namespace mqc {

using cplx = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;

// An operator in the permutation-symmetric subspace, stored as its
// coefficients over an orthonormal SymmetricBasis. The coefficient of label
// (m, n, h) carries coherence order m - n.
class SymOperator {
 public:
  explicit SymOperator(BasisPtr basis);
  SymOperator(BasisPtr basis, Eigen::VectorXcd coeffs);

  static SymOperator zero(BasisPtr basis) { return SymOperator(std::move(basis)); }
  static SymOperator identity(BasisPtr basis);
  static SymOperator element(BasisPtr basis, const Label& l);

  const SymmetricBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  int n_spins() const { return basis_->n_spins(); }
  std::size_t size() const { return static_cast<std::size_t>(coeffs_.size()); }

  const Eigen::VectorXcd& coeffs() const { return coeffs_; }
  Eigen::VectorXcd& coeffs() { return coeffs_; }
  cplx coeff(const Label& l) const { return coeffs_[static_cast<Eigen::Index>(basis_->index(l))]; }
  cplx& coeff(const Label& l) { return coeffs_[static_cast<Eigen::Index>(basis_->index(l))]; }

  SymOperator adjoint() const;
  bool is_hermitian(double tol = 1e-10) const;
  bool is_real() const;
  cplx trace() const;
  double hs_norm() const { return coeffs_.norm(); }

  SymOperator& operator+=(const SymOperator& o);
  SymOperator& operator-=(const SymOperator& o);
  SymOperator& operator*=(cplx s);

 private:
  BasisPtr basis_;
  Eigen::VectorXcd coeffs_;
};

SymOperator operator+(SymOperator a, const SymOperator& b);
SymOperator operator-(SymOperator a, const SymOperator& b);
SymOperator operator*(cplx s, SymOperator a);
SymOperator operator*(SymOperator a, cplx s);

// Throws IncompatibleError when the operands use different spin counts.
void require_same_basis(const SymOperator& a, const SymOperator& b);

// Operator product a*b in the symmetric algebra.
SymOperator multiply(const SymOperator& a, const SymOperator& b);

// Tr(a^dagger b); a plain conjugated dot product in the orthonormal basis.
cplx hs_inner(const SymOperator& a, const SymOperator& b);

// sum_i op_i for a single-site 2x2 operator (index 0 = |0>, 1 = |1>).
SymOperator one_body(const BasisPtr& basis, const Matrix2c& op);

// sum_{i != j} a_i b_j over ordered pairs of distinct sites.
SymOperator two_body(const BasisPtr& basis, const Matrix2c& a, const Matrix2c& b);

namespace spin {
Matrix2c ix();
Matrix2c iy();
Matrix2c iz();
Matrix2c raise();  // sigma+ = |0><1|
Matrix2c lower();  // sigma- = |1><0|
}  // namespace spin

SymOperator collective_x(const BasisPtr& basis);
SymOperator collective_y(const BasisPtr& basis);
SymOperator collective_z(const BasisPtr& basis);

}  // namespace mqc
