#pragma once

// Dense complex linear algebra used by every other module: Kronecker products,
// partial traces, a cyclic Jacobi eigensolver for Hermitian matrices, norms and
// spectral functions. All routines are pure functions of their arguments.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "qdecept/errors.hpp"

namespace qdecept {

using Index = Eigen::Index;

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using ComplexMatrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using ComplexVector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <typename Real>
using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

// Tolerance scaled to the magnitude of the data it guards, never below 1e-12.
template <typename Real>
Real scaled_tolerance(Real relative, Real magnitude) {
  return std::max(relative * magnitude, Real(1e-12));
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      const auto z = m(i, j);
      if (!std::isfinite(std::real(z)) || !std::isfinite(std::imag(z))) return false;
    }
  }
  return true;
}

/// Square complex matrix equal to its conjugate transpose.
///
/// The only way in is the symmetrizing constructor, which stores (M + M^H)/2,
/// so entry(i,j) == conj(entry(j,i)) holds bit-for-bit and the diagonal is real.
template <typename Real = double>
class HermitianOperator {
 public:
  using Matrix = ComplexMatrix<Real>;

  HermitianOperator() = default;

  explicit HermitianOperator(const Matrix& m) : m_(m.rows(), m.cols()) {
    if (m.rows() != m.cols()) {
      throw DimensionError("HermitianOperator: matrix is " + std::to_string(m.rows()) + "x" +
                           std::to_string(m.cols()) + ", expected square");
    }
    if (!all_finite(m)) throw InvalidInputError("HermitianOperator: non-finite entry");
    const Index n = m.rows();
    for (Index i = 0; i < n; ++i) {
      m_(i, i) = Complex<Real>(std::real(m(i, i)), Real(0));
      for (Index j = i + 1; j < n; ++j) {
        const Complex<Real> upper = (m(i, j) + std::conj(m(j, i))) / Real(2);
        m_(i, j) = upper;
        m_(j, i) = std::conj(upper);
      }
    }
  }

  static HermitianOperator Zero(Index dim) { return HermitianOperator(Matrix::Zero(dim, dim)); }
  static HermitianOperator Identity(Index dim) {
    return HermitianOperator(Matrix::Identity(dim, dim));
  }

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  Complex<Real> operator()(Index i, Index j) const { return m_(i, j); }

  Real trace() const { return std::real(m_.trace()); }

  HermitianOperator operator+(const HermitianOperator& o) const {
    check_same(o);
    return HermitianOperator(m_ + o.m_);
  }
  HermitianOperator operator-(const HermitianOperator& o) const {
    check_same(o);
    return HermitianOperator(m_ - o.m_);
  }
  HermitianOperator operator-() const { return HermitianOperator(Matrix(-m_)); }
  HermitianOperator operator*(Real s) const { return HermitianOperator(Matrix(m_ * s)); }
  friend HermitianOperator operator*(Real s, const HermitianOperator& h) { return h * s; }

 private:
  void check_same(const HermitianOperator& o) const {
    if (o.dim() != dim()) throw DimensionError("HermitianOperator: dimension mismatch");
  }

  Matrix m_;
};

using HermitianOperatord = HermitianOperator<double>;

// ---------------------------------------------------------------------------
// Tensor structure

/// Kronecker product; entry (i*rows_B + k, j*cols_B + l) = A(i,j) * B(k,l).
template <typename Real>
ComplexMatrix<Real> kron(const ComplexMatrix<Real>& a, const ComplexMatrix<Real>& b) {
  ComplexMatrix<Real> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

namespace detail {
inline void check_bipartite(Index dim, Index n_a, Index n_b, const char* who) {
  if (n_a <= 0 || n_b <= 0 || dim != n_a * n_b) {
    throw DimensionError(std::string(who) + ": operator of dimension " + std::to_string(dim) +
                         " does not factor as " + std::to_string(n_a) + "x" +
                         std::to_string(n_b));
  }
}
}  // namespace detail

/// Traces out the first factor of an (n_a*n_b)-dimensional operator.
template <typename Real>
ComplexMatrix<Real> partial_trace_a(const ComplexMatrix<Real>& m, Index n_a, Index n_b) {
  if (m.rows() != m.cols()) throw DimensionError("partial_trace_a: matrix not square");
  detail::check_bipartite(m.rows(), n_a, n_b, "partial_trace_a");
  ComplexMatrix<Real> out = ComplexMatrix<Real>::Zero(n_b, n_b);
  for (Index i = 0; i < n_a; ++i) out += m.block(i * n_b, i * n_b, n_b, n_b);
  return out;
}

template <typename Real>
HermitianOperator<Real> partial_trace_a(const HermitianOperator<Real>& m, Index n_a, Index n_b) {
  return HermitianOperator<Real>(partial_trace_a(m.matrix(), n_a, n_b));
}

/// Traces out the second factor; entry(i,j) = sum_k M(i*n_b+k, j*n_b+k).
template <typename Real>
ComplexMatrix<Real> partial_trace_b(const ComplexMatrix<Real>& m, Index n_a, Index n_b) {
  if (m.rows() != m.cols()) throw DimensionError("partial_trace_b: matrix not square");
  detail::check_bipartite(m.rows(), n_a, n_b, "partial_trace_b");
  ComplexMatrix<Real> out(n_a, n_a);
  for (Index i = 0; i < n_a; ++i) {
    for (Index j = 0; j < n_a; ++j) {
      out(i, j) = m.block(i * n_b, j * n_b, n_b, n_b).trace();
    }
  }
  return out;
}

template <typename Real>
HermitianOperator<Real> partial_trace_b(const HermitianOperator<Real>& m, Index n_a, Index n_b) {
  return HermitianOperator<Real>(partial_trace_b(m.matrix(), n_a, n_b));
}

// ---------------------------------------------------------------------------
// Norms

template <typename Derived>
auto frobenius_norm(const Eigen::MatrixBase<Derived>& m) {
  return m.norm();
}

template <typename Real>
Real frobenius_norm(const HermitianOperator<Real>& h) {
  return h.matrix().norm();
}

/// Norm induced by the vector 1-norm: the largest absolute column sum.
template <typename Derived>
auto induced_one_norm(const Eigen::MatrixBase<Derived>& m) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  if (m.size() == 0) return Real(0);
  return Real(m.cwiseAbs().colwise().sum().maxCoeff());
}

template <typename Real>
Real induced_one_norm(const HermitianOperator<Real>& h) {
  return induced_one_norm(h.matrix());
}

// ---------------------------------------------------------------------------
// Eigendecomposition

template <typename Real>
struct HermitianEigen {
  RealVector<Real> values;       // ascending
  ComplexMatrix<Real> vectors;   // orthonormal columns, vectors.col(k) pairs with values(k)
  int sweeps = 0;
};

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
///
/// Each rotation first removes the phase of the pivot a(p,q) with a diagonal
/// unitary, then applies the real Jacobi rotation that annihilates the now
/// real off-diagonal pair. Sweeps repeat until the off-diagonal mass falls to
/// machine precision relative to ||M||_F. Eigenvalues are returned sorted
/// ascending; equal eigenvalues keep the order in which Jacobi left them, so
/// the result is deterministic.
///
/// Throws ConvergenceError when max_sweeps is exhausted.
template <typename Real>
HermitianEigen<Real> eig_hermitian(const HermitianOperator<Real>& op, int max_sweeps = 64) {
  using C = Complex<Real>;
  const Index n = op.dim();
  ComplexMatrix<Real> a = op.matrix();
  ComplexMatrix<Real> v = ComplexMatrix<Real>::Identity(n, n);
  const Real scale = a.norm();
  const Real eps = std::numeric_limits<Real>::epsilon();

  auto off_norm = [&] {
    Real s = 0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) s += std::norm(a(p, q));
    return std::sqrt(Real(2) * s);
  };

  HermitianEigen<Real> out;
  int sweep = 0;
  if (scale > 0) {
    const Real target = eps * scale;
    while (off_norm() > target) {
      if (sweep == max_sweeps) {
        throw ConvergenceError("eig_hermitian: Jacobi sweep limit reached", double(off_norm()));
      }
      ++sweep;
      for (Index p = 0; p < n; ++p) {
        for (Index q = p + 1; q < n; ++q) {
          const C apq = a(p, q);
          const Real r = std::abs(apq);
          if (r <= eps * eps * scale) continue;
          const C phase = apq / r;
          const Real app = std::real(a(p, p));
          const Real aqq = std::real(a(q, q));
          const Real theta = Real(0.5) * std::atan2(Real(2) * r, aqq - app);
          const Real c = std::cos(theta);
          const Real s = std::sin(theta);
          // U = diag(1, conj(phase)) * [[c, s], [-s, c]]
          const C u00(c, 0), u01(s, 0);
          const C u10 = -s * std::conj(phase), u11 = c * std::conj(phase);
          for (Index k = 0; k < n; ++k) {
            const C akp = a(k, p), akq = a(k, q);
            a(k, p) = akp * u00 + akq * u10;
            a(k, q) = akp * u01 + akq * u11;
            const C vkp = v(k, p), vkq = v(k, q);
            v(k, p) = vkp * u00 + vkq * u10;
            v(k, q) = vkp * u01 + vkq * u11;
          }
          for (Index k = 0; k < n; ++k) {
            const C apk = a(p, k), aqk = a(q, k);
            a(p, k) = std::conj(u00) * apk + std::conj(u10) * aqk;
            a(q, k) = std::conj(u01) * apk + std::conj(u11) * aqk;
          }
          a(p, q) = C(0);
          a(q, p) = C(0);
          a(p, p) = C(std::real(a(p, p)), 0);
          a(q, q) = C(std::real(a(q, q)), 0);
        }
      }
    }
  }

  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Index x, Index y) { return std::real(a(x, x)) < std::real(a(y, y)); });
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    out.values(k) = std::real(a(order[size_t(k)], order[size_t(k)]));
    out.vectors.col(k) = v.col(order[size_t(k)]);
  }
  out.sweeps = sweep;
  return out;
}

template <typename Real>
Real lambda_min(const HermitianOperator<Real>& h) {
  return eig_hermitian(h).values(0);
}

template <typename Real>
Real lambda_max(const HermitianOperator<Real>& h) {
  const auto e = eig_hermitian(h);
  return e.values(e.values.size() - 1);
}

template <typename Real>
Real spectral_radius(const HermitianOperator<Real>& h) {
  const auto e = eig_hermitian(h);
  return std::max(std::abs(e.values(0)), std::abs(e.values(e.values.size() - 1)));
}

/// V f(diag(lambda)) V^H for a decomposition V diag(lambda) V^H.
template <typename Real, typename Fn>
HermitianOperator<Real> spectral_map(const HermitianEigen<Real>& e, Fn&& f) {
  RealVector<Real> mapped(e.values.size());
  for (Index k = 0; k < e.values.size(); ++k) mapped(k) = f(e.values(k));
  const ComplexMatrix<Real> scaled = e.vectors * mapped.template cast<Complex<Real>>().asDiagonal();
  return HermitianOperator<Real>(ComplexMatrix<Real>(scaled * e.vectors.adjoint()));
}

/// Clamps negative eigenvalues to zero.
template <typename Real>
HermitianOperator<Real> project_psd(const HermitianOperator<Real>& h) {
  return spectral_map(eig_hermitian(h), [](Real x) { return std::max(x, Real(0)); });
}

/// exp(L) / tr(exp(L)), evaluated with the largest eigenvalue shifted to zero.
template <typename Real>
HermitianOperator<Real> normalized_exp(const HermitianOperator<Real>& logits) {
  const auto e = eig_hermitian(logits);
  const Real top = e.values(e.values.size() - 1);
  Real z = 0;
  for (Index k = 0; k < e.values.size(); ++k) z += std::exp(e.values(k) - top);
  return spectral_map(e, [&](Real x) { return std::exp(x - top) / z; });
}

}  // namespace qdecept
