#include "mqc/sym_operator.hpp"

#include <cmath>

#include "mqc/errors.hpp"

namespace mqc {

SymOperator::SymOperator(BasisPtr basis)
    : basis_(std::move(basis)),
      coeffs_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis_->size()))) {}

SymOperator::SymOperator(BasisPtr basis, Eigen::VectorXcd coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  if (static_cast<std::size_t>(coeffs_.size()) != basis_->size()) {
    throw IncompatibleError("coefficient count " + std::to_string(coeffs_.size()) +
                            " does not match basis size " +
                            std::to_string(basis_->size()));
  }
}

SymOperator SymOperator::identity(BasisPtr basis) {
  SymOperator out(basis);
  for (int m = 0; m <= basis->n_spins(); ++m) {
    const std::size_t i = basis->index({m, m, 0});
    out.coeffs_[static_cast<Eigen::Index>(i)] = basis->norm(i);
  }
  return out;
}

SymOperator SymOperator::element(BasisPtr basis, const Label& l) {
  SymOperator out(basis);
  out.coeffs_[static_cast<Eigen::Index>(basis->index(l))] = 1.0;
  return out;
}

SymOperator SymOperator::adjoint() const {
  // (T^h_{m,n})^dagger = T^h_{n,m}
  SymOperator out(basis_);
  for (std::size_t i = 0; i < size(); ++i) {
    const Label& l = basis_->label(i);
    const std::size_t j = basis_->index({l.n, l.m, l.h});
    out.coeffs_[static_cast<Eigen::Index>(j)] = std::conj(coeffs_[static_cast<Eigen::Index>(i)]);
  }
  return out;
}

bool SymOperator::is_hermitian(double tol) const {
  const double scale = std::max(1.0, hs_norm());
  return (adjoint().coeffs_ - coeffs_).cwiseAbs().maxCoeff() <= tol * scale;
}

bool SymOperator::is_real() const { return coeffs_.imag().isZero(0.0); }

cplx SymOperator::trace() const {
  cplx t = 0.0;
  for (int m = 0; m <= n_spins(); ++m) {
    const std::size_t i = basis_->index({m, m, 0});
    t += basis_->norm(i) * coeffs_[static_cast<Eigen::Index>(i)];
  }
  return t;
}

SymOperator& SymOperator::operator+=(const SymOperator& o) {
  require_same_basis(*this, o);
  coeffs_ += o.coeffs_;
  return *this;
}

SymOperator& SymOperator::operator-=(const SymOperator& o) {
  require_same_basis(*this, o);
  coeffs_ -= o.coeffs_;
  return *this;
}

SymOperator& SymOperator::operator*=(cplx s) {
  coeffs_ *= s;
  return *this;
}

SymOperator operator+(SymOperator a, const SymOperator& b) { return a += b; }
SymOperator operator-(SymOperator a, const SymOperator& b) { return a -= b; }
SymOperator operator*(cplx s, SymOperator a) { return a *= s; }
SymOperator operator*(SymOperator a, cplx s) { return a *= s; }

void require_same_basis(const SymOperator& a, const SymOperator& b) {
  if (a.n_spins() != b.n_spins()) {
    throw IncompatibleError("operands built on different bases (N=" +
                            std::to_string(a.n_spins()) + " vs N=" +
                            std::to_string(b.n_spins()) + ")");
  }
}

SymOperator multiply(const SymOperator& a, const SymOperator& b) {
  require_same_basis(a, b);
  const SymmetricBasis& basis = a.basis();
  SymOperator out(a.basis_ptr());
  auto& oc = out.coeffs();
  const auto& ac = a.coeffs();
  const auto& bc = b.coeffs();
  for (std::size_t ia = 0; ia < basis.size(); ++ia) {
    const cplx ca = ac[static_cast<Eigen::Index>(ia)];
    if (ca == 0.0) continue;
    for (std::size_t ib : basis.with_m(basis.label(ia).n)) {
      const cplx cb = bc[static_cast<Eigen::Index>(ib)];
      if (cb == 0.0) continue;
      const cplx w = ca * cb;
      basis.for_each_product(ia, ib, [&](std::size_t ir, double chi) {
        oc[static_cast<Eigen::Index>(ir)] += w * chi;
      });
    }
  }
  return out;
}

cplx hs_inner(const SymOperator& a, const SymOperator& b) {
  require_same_basis(a, b);
  return a.coeffs().dot(b.coeffs());  // Eigen conjugates the left operand
}

namespace {

struct SiteCounts {
  int n00, n11, n_plus, n_minus;
};

SiteCounts counts(const Label& l, int N) {
  SiteCounts c{};
  c.n_plus = (l.h + l.m - l.n) / 2;
  c.n_minus = (l.h - l.m + l.n) / 2;
  c.n00 = l.m - c.n_plus;
  c.n11 = N - c.n_plus - c.n_minus - c.n00;
  return c;
}

}  // namespace

// Coefficient on label l equals k(l) times the matrix element between any
// representative pair of strings of that label.
SymOperator one_body(const BasisPtr& basis, const Matrix2c& op) {
  SymOperator out(basis);
  const int N = basis->n_spins();
  for (std::size_t i = 0; i < basis->size(); ++i) {
    const Label& l = basis->label(i);
    const SiteCounts c = counts(l, N);
    cplx v = 0.0;
    if (l.h == 0) {
      v = static_cast<double>(c.n00) * op(0, 0) + static_cast<double>(c.n11) * op(1, 1);
    } else if (l.h == 1) {
      v = c.n_plus == 1 ? op(0, 1) : op(1, 0);
    }
    out.coeffs()[static_cast<Eigen::Index>(i)] = basis->norm(i) * v;
  }
  return out;
}

SymOperator two_body(const BasisPtr& basis, const Matrix2c& a, const Matrix2c& b) {
  SymOperator out(basis);
  const int N = basis->n_spins();
  for (std::size_t i = 0; i < basis->size(); ++i) {
    const Label& l = basis->label(i);
    if (l.h > 2) continue;
    const SiteCounts c = counts(l, N);
    const double n00 = c.n00;
    const double n11 = c.n11;
    const cplx sa = n00 * a(0, 0) + n11 * a(1, 1);
    const cplx sb = n00 * b(0, 0) + n11 * b(1, 1);
    cplx v = 0.0;
    if (l.h == 0) {
      v = sa * sb - (n00 * a(0, 0) * b(0, 0) + n11 * a(1, 1) * b(1, 1));
    } else if (l.h == 1) {
      const cplx at = c.n_plus == 1 ? a(0, 1) : a(1, 0);
      const cplx bt = c.n_plus == 1 ? b(0, 1) : b(1, 0);
      v = at * sb + bt * sa;
    } else if (c.n_plus == 2) {
      v = 2.0 * a(0, 1) * b(0, 1);
    } else if (c.n_minus == 2) {
      v = 2.0 * a(1, 0) * b(1, 0);
    } else {
      v = a(0, 1) * b(1, 0) + a(1, 0) * b(0, 1);
    }
    out.coeffs()[static_cast<Eigen::Index>(i)] = basis->norm(i) * v;
  }
  return out;
}

namespace spin {
Matrix2c ix() {
  Matrix2c m;
  m << 0.0, 0.5, 0.5, 0.0;
  return m;
}
Matrix2c iy() {
  Matrix2c m;
  m << 0.0, cplx(0.0, -0.5), cplx(0.0, 0.5), 0.0;
  return m;
}
Matrix2c iz() {
  Matrix2c m;
  m << 0.5, 0.0, 0.0, -0.5;
  return m;
}
Matrix2c raise() {
  Matrix2c m;
  m << 0.0, 1.0, 0.0, 0.0;
  return m;
}
Matrix2c lower() {
  Matrix2c m;
  m << 0.0, 0.0, 1.0, 0.0;
  return m;
}
}  // namespace spin

SymOperator collective_x(const BasisPtr& basis) { return one_body(basis, spin::ix()); }
SymOperator collective_y(const BasisPtr& basis) { return one_body(basis, spin::iy()); }
SymOperator collective_z(const BasisPtr& basis) { return one_body(basis, spin::iz()); }

}  // namespace mqc
