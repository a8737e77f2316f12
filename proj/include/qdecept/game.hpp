#pragma once

// Two-player zero-sum quantum games over unentangled (product) strategies.
// Player A minimizes tr((rho_A (x) rho_B) H), player B maximizes it.

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "qdecept/linalg.hpp"

namespace qdecept {

/// Positive semidefinite, unit-trace Hermitian operator.
///
/// Construction tolerates inputs that are slightly off the state space
/// (lambda_min >= -1e-7, |tr - 1| <= 1e-7), snapping them back by clamping
/// negative eigenvalues and renormalizing. Anything further away is rejected.
template <typename Real = double>
class DensityMatrix {
 public:
  static constexpr double kAcceptTolerance = 1e-7;

  DensityMatrix() = default;

  explicit DensityMatrix(const HermitianOperator<Real>& op) {
    if (op.dim() == 0) throw DimensionError("DensityMatrix: empty operator");
    const auto e = eig_hermitian(op);
    const Real tr = e.values.sum();
    if (e.values(0) < -Real(kAcceptTolerance) || std::abs(tr - 1) > Real(kAcceptTolerance)) {
      throw InvalidInputError("DensityMatrix: not a state (lambda_min=" +
                              std::to_string(double(e.values(0))) +
                              ", trace=" + std::to_string(double(tr)) + ")");
    }
    if (e.values(0) < 0) {
      HermitianOperator<Real> clamped =
          spectral_map(e, [](Real x) { return std::max(x, Real(0)); });
      rho_ = clamped * (Real(1) / clamped.trace());
    } else {
      rho_ = op * (Real(1) / tr);
    }
  }

  static DensityMatrix maximally_mixed(Index dim) {
    return DensityMatrix(HermitianOperator<Real>::Identity(dim) * (Real(1) / Real(dim)));
  }

  /// |v><v| / <v|v>.
  static DensityMatrix projector(const ComplexVector<Real>& v) {
    const Real n2 = v.squaredNorm();
    if (!(n2 > 0)) throw InvalidInputError("DensityMatrix::projector: zero vector");
    DensityMatrix out;
    out.rho_ = HermitianOperator<Real>(ComplexMatrix<Real>(v * v.adjoint() / n2));
    return out;
  }

  /// exp(L)/tr exp(L); positive definite with unit trace by construction.
  static DensityMatrix gibbs(const HermitianOperator<Real>& logits) {
    DensityMatrix out;
    out.rho_ = normalized_exp(logits);
    return out;
  }

  Index dim() const { return rho_.dim(); }
  const HermitianOperator<Real>& op() const { return rho_; }
  const ComplexMatrix<Real>& matrix() const { return rho_.matrix(); }
  Complex<Real> operator()(Index i, Index j) const { return rho_(i, j); }

  /// Convex combination w*this + (1-w)*other, w in [0,1].
  DensityMatrix mix(const DensityMatrix& other, Real w) const {
    if (other.dim() != dim()) throw DimensionError("DensityMatrix::mix: dimension mismatch");
    DensityMatrix out;
    out.rho_ = rho_ * w + other.rho_ * (Real(1) - w);
    return out;
  }

 private:
  HermitianOperator<Real> rho_;
};

/// Unit vector in a player's Hilbert space.
template <typename Real = double>
class PureState {
 public:
  explicit PureState(ComplexVector<Real> amplitudes) : psi_(std::move(amplitudes)) {
    if (psi_.size() == 0) throw DimensionError("PureState: empty vector");
    if (std::abs(psi_.norm() - Real(1)) > Real(1e-9)) {
      throw InvalidInputError("PureState: amplitudes are not unit norm");
    }
  }

  static PureState normalized(const ComplexVector<Real>& v) {
    const Real n = v.norm();
    if (!(n > 0)) throw InvalidInputError("PureState: zero vector");
    return PureState(ComplexVector<Real>(v / n));
  }

  static PureState basis(Index dim, Index k) {
    ComplexVector<Real> v = ComplexVector<Real>::Zero(dim);
    v(k) = Real(1);
    return PureState(std::move(v));
  }

  /// cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
  static PureState bloch(Real theta, Real phi) {
    ComplexVector<Real> v(2);
    v(0) = std::cos(theta / 2);
    v(1) = std::polar(std::sin(theta / 2), phi);
    return PureState(std::move(v));
  }

  Index dim() const { return psi_.size(); }
  const ComplexVector<Real>& amplitudes() const { return psi_; }
  DensityMatrix<Real> density() const { return DensityMatrix<Real>::projector(psi_); }

 private:
  ComplexVector<Real> psi_;
};

/// Payoff Hamiltonian on C^{n_a} (x) C^{n_b}.
template <typename Real = double>
class QuantumGame {
 public:
  QuantumGame(Index n_a, Index n_b, HermitianOperator<Real> h, std::string label = {})
      : n_a_(n_a), n_b_(n_b), h_(std::move(h)), label_(std::move(label)) {
    detail::check_bipartite(h_.dim(), n_a_, n_b_, "QuantumGame");
  }

  Index n_a() const { return n_a_; }
  Index n_b() const { return n_b_; }
  Index dim() const { return h_.dim(); }
  const HermitianOperator<Real>& hamiltonian() const { return h_; }
  const std::string& label() const { return label_; }

  QuantumGame with_hamiltonian(HermitianOperator<Real> h, std::string label = {}) const {
    return QuantumGame(n_a_, n_b_, std::move(h), label.empty() ? label_ : std::move(label));
  }

  /// Same game with the minimizer and maximizer exchanged (H -> -H).
  QuantumGame with_roles_swapped() const { return with_hamiltonian(-h_, label_ + "/swapped"); }

 private:
  Index n_a_ = 0;
  Index n_b_ = 0;
  HermitianOperator<Real> h_;
  std::string label_;
};

using DensityMatrixd = DensityMatrix<double>;
using PureStated = PureState<double>;
using QuantumGamed = QuantumGame<double>;

namespace detail {
template <typename Real>
void check_state(const QuantumGame<Real>& g, Index dim_a, Index dim_b, const char* who) {
  if (dim_a != g.n_a() || dim_b != g.n_b()) {
    throw DimensionError(std::string(who) + ": strategy dimensions (" + std::to_string(dim_a) +
                         ", " + std::to_string(dim_b) + ") do not match game (" +
                         std::to_string(g.n_a()) + ", " + std::to_string(g.n_b()) + ")");
  }
}
}  // namespace detail

/// tr((rho_A (x) rho_B) H).
template <typename Real>
Real payoff(const QuantumGame<Real>& g, const DensityMatrix<Real>& rho_a,
            const DensityMatrix<Real>& rho_b) {
  detail::check_state(g, rho_a.dim(), rho_b.dim(), "payoff");
  const Index nb = g.n_b();
  const auto& h = g.hamiltonian().matrix();
  Complex<Real> acc(0);
  for (Index i = 0; i < g.n_a(); ++i)
    for (Index j = 0; j < g.n_a(); ++j) {
      const Complex<Real> a = rho_a(i, j);
      if (a == Complex<Real>(0)) continue;
      for (Index k = 0; k < nb; ++k)
        for (Index l = 0; l < nb; ++l) acc += a * rho_b(k, l) * h(j * nb + l, i * nb + k);
    }
  if (std::abs(std::imag(acc)) > scaled_tolerance(Real(1e-9), frobenius_norm(g.hamiltonian()))) {
    throw std::logic_error("payoff: imaginary residue on a Hermitian game");
  }
  return std::real(acc);
}

/// <psi_A (x) psi_B| H |psi_A (x) psi_B>.
template <typename Real>
Real payoff_pure(const QuantumGame<Real>& g, const PureState<Real>& psi_a,
                 const PureState<Real>& psi_b) {
  detail::check_state(g, psi_a.dim(), psi_b.dim(), "payoff_pure");
  const ComplexVector<Real> joint =
      kron<Real>(psi_a.amplitudes(), psi_b.amplitudes());
  return std::real(joint.dot(g.hamiltonian().matrix() * joint));
}

/// K_A(rho_B) = tr_B((I_A (x) rho_B) H); tr(rho_A K_A) is the payoff for every rho_A.
template <typename Real>
HermitianOperator<Real> conditioned_operator_a(const QuantumGame<Real>& g,
                                               const DensityMatrix<Real>& rho_b) {
  if (rho_b.dim() != g.n_b()) throw DimensionError("conditioned_operator_a: rho_B dimension");
  const Index na = g.n_a(), nb = g.n_b();
  const auto& h = g.hamiltonian().matrix();
  ComplexMatrix<Real> k(na, na);
  for (Index i = 0; i < na; ++i)
    for (Index j = 0; j < na; ++j) {
      Complex<Real> acc(0);
      for (Index p = 0; p < nb; ++p)
        for (Index q = 0; q < nb; ++q) acc += rho_b(p, q) * h(i * nb + q, j * nb + p);
      k(i, j) = acc;
    }
  return HermitianOperator<Real>(k);
}

/// K_B(rho_A) = tr_A((rho_A (x) I_B) H).
template <typename Real>
HermitianOperator<Real> conditioned_operator_b(const QuantumGame<Real>& g,
                                               const DensityMatrix<Real>& rho_a) {
  if (rho_a.dim() != g.n_a()) throw DimensionError("conditioned_operator_b: rho_A dimension");
  const Index na = g.n_a(), nb = g.n_b();
  const auto& h = g.hamiltonian().matrix();
  ComplexMatrix<Real> k = ComplexMatrix<Real>::Zero(nb, nb);
  for (Index i = 0; i < na; ++i)
    for (Index j = 0; j < na; ++j) {
      const Complex<Real> a = rho_a(i, j);
      if (a == Complex<Real>(0)) continue;
      k += a * h.block(j * nb, i * nb, nb, nb);
    }
  return HermitianOperator<Real>(k);
}

}  // namespace qdecept
