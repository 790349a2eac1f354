#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "mqc/errors.hpp"
#include "mqc/oracle.hpp"
#include "mqc/superop.hpp"

using namespace mqc;
using testing::max_abs;

TEST_CASE("multiply matches the matrix product") {
  std::mt19937_64 rng(11);
  for (int n = 1; n <= 4; ++n) {
    const auto b = enumerate_basis(n);
    const SymOperator x = testing::random_hermitian(b, rng);
    const SymOperator y = testing::random_hermitian(b, rng);
    const oracle::Mat exact = oracle::embed(x) * oracle::embed(y);
    CHECK(max_abs(oracle::embed(multiply(x, y)) - exact) < 1e-10);
  }
}

TEST_CASE("embed and project are inverse on symmetric operators") {
  std::mt19937_64 rng(5);
  const auto b = enumerate_basis(4);
  const SymOperator x = testing::random_operator(b, rng);
  CHECK((oracle::project(oracle::embed(x), b).coeffs() - x.coeffs()).norm() < 1e-12);
}

TEST_CASE("hs_inner is Tr(a^dagger b)") {
  std::mt19937_64 rng(7);
  const auto b = enumerate_basis(3);
  const SymOperator x = testing::random_operator(b, rng);
  const SymOperator y = testing::random_operator(b, rng);
  const cplx exact = (oracle::embed(x).adjoint() * oracle::embed(y)).trace();
  CHECK(std::abs(hs_inner(x, y) - exact) < 1e-12);
}

TEST_CASE("adjoint, trace and identity") {
  std::mt19937_64 rng(3);
  const auto b = enumerate_basis(4);
  const SymOperator x = testing::random_operator(b, rng);
  CHECK(max_abs(oracle::embed(x.adjoint()) - oracle::embed(x).adjoint()) < 1e-12);
  CHECK(std::abs(x.trace() - oracle::embed(x).trace()) < 1e-12);
  const SymOperator id = SymOperator::identity(b);
  CHECK(id.trace().real() == doctest::Approx(16.0));
  CHECK(max_abs(oracle::embed(id) - Eigen::MatrixXcd::Identity(16, 16)) < 1e-13);
  CHECK(testing::random_hermitian(b, rng).is_hermitian());
  CHECK_FALSE(x.is_hermitian());
}

TEST_CASE("one- and two-body sums match site operators") {
  const auto b = enumerate_basis(3);
  const Matrix2c ops[5] = {spin::ix(), spin::iy(), spin::iz(), spin::raise(), spin::lower()};
  for (const auto& a : ops) {
    CHECK(max_abs(oracle::embed(one_body(b, a)) - oracle::collective(3, a)) < 1e-12);
    for (const auto& c : ops) {
      Eigen::MatrixXcd exact = Eigen::MatrixXcd::Zero(8, 8);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          if (i != j) exact += oracle::site_operator(3, i, a) * oracle::site_operator(3, j, c);
        }
      }
      CHECK(max_abs(oracle::embed(two_body(b, a, c)) - exact) < 1e-12);
    }
  }
}

TEST_CASE("operands on different bases are rejected") {
  const SymOperator x = SymOperator::identity(enumerate_basis(2));
  const SymOperator y = SymOperator::identity(enumerate_basis(3));
  CHECK_THROWS_AS(multiply(x, y), IncompatibleError);
  CHECK_THROWS_AS(hs_inner(x, y), IncompatibleError);
  CHECK_THROWS_AS(x + y, IncompatibleError);
}

TEST_CASE("superoperators match explicit left/right products") {
  std::mt19937_64 rng(13);
  const auto b = enumerate_basis(3);
  const SymOperator rho = testing::random_state(b, rng);
  const SymOperator x = testing::random_operator(b, rng);
  const auto er = oracle::embed(rho);
  const auto ex = oracle::embed(x);
  CHECK(max_abs(oracle::embed(anticommutator_superop(rho).apply(x)) - (er * ex + ex * er)) < 1e-10);
  CHECK(max_abs(oracle::embed(commutator_superop(rho).apply(x)) - (er * ex - ex * er)) < 1e-10);
  CHECK(max_abs(oracle::embed(left_mult_superop(rho).apply(x)) - er * ex) < 1e-10);
  CHECK(max_abs(oracle::embed(right_mult_superop(rho).apply(x)) - ex * er) < 1e-10);
  const auto a = anticommutator_superop(rho).to_dense();
  CHECK((a - a.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}
