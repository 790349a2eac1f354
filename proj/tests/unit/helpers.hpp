#pragma once

#include <random>

#include "mqc/oracle.hpp"
#include "mqc/sym_operator.hpp"

namespace testing {

inline mqc::SymOperator random_operator(const mqc::BasisPtr& basis, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  mqc::SymOperator x(basis);
  for (Eigen::Index i = 0; i < x.coeffs().size(); ++i) x.coeffs()[i] = {g(rng), g(rng)};
  return x;
}

inline mqc::SymOperator random_hermitian(const mqc::BasisPtr& basis, std::mt19937_64& rng) {
  mqc::SymOperator x = random_operator(basis, rng);
  return x + x.adjoint();
}

// A A^dagger normalized to unit trace: positive and permutation symmetric.
inline mqc::SymOperator random_state(const mqc::BasisPtr& basis, std::mt19937_64& rng) {
  mqc::SymOperator a = random_operator(basis, rng);
  mqc::SymOperator rho = mqc::multiply(a, a.adjoint());
  rho *= 1.0 / rho.trace().real();
  return rho;
}

inline double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testing
