#include <bit>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "mqc/errors.hpp"
#include "mqc/oracle.hpp"
#include "mqc/symbasis.hpp"

using namespace mqc;

TEST_CASE("label count is (N+1)(N+2)(N+3)/6") {
  for (int n = 1; n <= 40; ++n) {
    const auto b = enumerate_basis(n);
    CHECK(b->size() == static_cast<std::size_t>((n + 1) * (n + 2) * (n + 3) / 6));
    CHECK(b->size() == expected_basis_size(n));
  }
}

TEST_CASE("labels are lexicographic, unique and valid") {
  const auto b = enumerate_basis(7);
  for (std::size_t i = 1; i < b->size(); ++i) CHECK(b->label(i - 1) < b->label(i));
  for (std::size_t i = 0; i < b->size(); ++i) {
    const Label& l = b->label(i);
    CHECK(b->index(l) == i);
    CHECK(l.h >= std::abs(l.m - l.n));
    CHECK((l.h - std::abs(l.m - l.n)) % 2 == 0);
    CHECK(l.h <= std::min(l.m + l.n, 2 * 7 - l.m - l.n));
  }
}

TEST_CASE("size and label errors") {
  CHECK_THROWS_AS(SymmetricBasis(0), SizeError);
  CHECK_THROWS_AS(SymmetricBasis(65), SizeError);
  CHECK_THROWS_AS(SymmetricBasis(10, 8), SizeError);
  const auto b = enumerate_basis(3);
  CHECK_THROWS_AS(b->index({1, 0, 0}), LabelError);
  CHECK_THROWS_AS(b->index({4, 0, 4}), LabelError);
  CHECK_FALSE(b->contains({2, 2, 1}));
  CHECK_THROWS_AS(b->structure_constants({1, 0, 0}, {0, 0, 0}), LabelError);
}

TEST_CASE("norm counts computational pairs") {
  for (int n = 1; n <= 5; ++n) {
    const auto b = enumerate_basis(n);
    std::vector<double> count(b->size(), 0.0);
    for (unsigned a = 0; a < (1U << n); ++a) {
      for (unsigned c = 0; c < (1U << n); ++c) {
        const Label l{n - std::popcount(a), n - std::popcount(c), std::popcount(a ^ c)};
        count[b->index(l)] += 1.0;
      }
    }
    for (std::size_t i = 0; i < b->size(); ++i) {
      CHECK(b->norm(i) == doctest::Approx(std::sqrt(count[i])).epsilon(1e-13));
    }
  }
}

TEST_CASE("basis is orthonormal under the trace inner product") {
  const auto b = enumerate_basis(3);
  for (std::size_t i = 0; i < b->size(); ++i) {
    const auto ti = oracle::embed(SymOperator::element(b, b->label(i)));
    for (std::size_t j = 0; j < b->size(); ++j) {
      const auto tj = oracle::embed(SymOperator::element(b, b->label(j)));
      const double expect = i == j ? 1.0 : 0.0;
      CHECK(std::abs((ti.adjoint() * tj).trace() - expect) < 1e-12);
    }
  }
}

TEST_CASE("structure constants agree with explicit products") {
  for (int n = 1; n <= 3; ++n) {
    const auto b = enumerate_basis(n);
    double worst = 0.0;
    for (const Label& x : b->labels()) {
      for (const Label& y : b->labels()) {
        const auto fast = b->structure_constants(x, y);
        const auto slow = oracle::structure_constants(b, x, y);
        for (const auto& [h, v] : fast) {
          const auto it = slow.find(h);
          worst = std::max(worst, std::abs(v - (it == slow.end() ? 0.0 : it->second)));
        }
        for (const auto& [h, v] : slow) {
          if (!fast.contains(h)) worst = std::max(worst, std::abs(v));
        }
      }
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("product vanishes when bra and ket counts do not match") {
  const auto b = enumerate_basis(4);
  CHECK(b->structure_constants({2, 1, 1}, {2, 2, 0}).empty());
}
