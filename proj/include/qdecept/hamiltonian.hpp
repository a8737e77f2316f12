#pragma once

// Payoff Hamiltonian construction: the three 4x4 Penny Flip subgames, the
// Hamiltonian-formalism lift of a classical payoff operator over a strategy
// basis, and the diagonal embedding of a classical matrix game.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qdecept/game.hpp"

namespace qdecept {

template <typename Real = double>
struct Pauli {
  static ComplexMatrix<Real> I() { return ComplexMatrix<Real>::Identity(2, 2); }
  static ComplexMatrix<Real> X() {
    ComplexMatrix<Real> m(2, 2);
    m << 0, 1, 1, 0;
    return m;
  }
  static ComplexMatrix<Real> Y() {
    const Complex<Real> i(0, 1);
    ComplexMatrix<Real> m(2, 2);
    m << Real(0), -i, i, Real(0);
    return m;
  }
  static ComplexMatrix<Real> Z() {
    ComplexMatrix<Real> m(2, 2);
    m << 1, 0, 0, -1;
    return m;
  }
  /// sigma_k for k = 0..3 in the order I, X, Y, Z.
  static ComplexMatrix<Real> by_index(int k) {
    switch (k) {
      case 0: return I();
      case 1: return X();
      case 2: return Y();
      case 3: return Z();
    }
    throw std::out_of_range("Pauli::by_index");
  }
};

/// Ordered set of unitary moves available to one player.
template <typename Real = double>
class StrategyBasis {
 public:
  StrategyBasis(std::vector<ComplexMatrix<Real>> elements, std::vector<std::string> labels)
      : elements_(std::move(elements)), labels_(std::move(labels)) {
    if (elements_.empty()) throw InvalidInputError("StrategyBasis: empty");
    if (labels_.size() != elements_.size()) {
      throw InvalidInputError("StrategyBasis: one label per element required");
    }
    const Index d = elements_.front().rows();
    for (const auto& u : elements_) {
      if (u.rows() != d || u.cols() != d) throw DimensionError("StrategyBasis: shape mismatch");
      const Real err = (u.adjoint() * u - ComplexMatrix<Real>::Identity(d, d)).norm();
      if (err > Real(1e-10)) throw InvalidInputError("StrategyBasis: element is not unitary");
    }
  }

  /// Basis from Pauli letters, e.g. "IX" gives {I, X}.
  static StrategyBasis pauli(std::string_view letters) {
    std::vector<ComplexMatrix<Real>> els;
    std::vector<std::string> labels;
    for (char c : letters) {
      const std::string_view table = "IXYZ";
      const auto k = table.find(c);
      if (k == std::string_view::npos) {
        throw InvalidInputError(std::string("StrategyBasis: unknown Pauli letter '") + c + "'");
      }
      els.push_back(Pauli<Real>::by_index(int(k)));
      labels.emplace_back(1, c);
    }
    return StrategyBasis(std::move(els), std::move(labels));
  }

  size_t size() const { return elements_.size(); }
  Index dim() const { return elements_.front().rows(); }
  const ComplexMatrix<Real>& operator[](size_t k) const { return elements_[k]; }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<ComplexMatrix<Real>> elements_;
  std::vector<std::string> labels_;
};

/// Inputs of the Hamiltonian-formalism lift on a single shared coin.
template <typename Real = double>
struct LiftSpec {
  HermitianOperator<Real> payoff_operator;
  DensityMatrix<Real> initial_state;
  StrategyBasis<Real> basis_a;
  StrategyBasis<Real> basis_b;
  Real scale = 1;
};

/// H(i,j) = scale * tr(P (nu_B nu_A) rho_0 (mu_B mu_A)^H), with row i = (mu_A, mu_B) and
/// column j = (nu_A, nu_B) enumerated lexicographically over the basis orderings. Player A's
/// unitary acts on the coin first.
template <typename Real>
QuantumGame<Real> lift_classical(const LiftSpec<Real>& spec) {
  const Index d = spec.payoff_operator.dim();
  if (spec.initial_state.dim() != d || spec.basis_a.dim() != d || spec.basis_b.dim() != d) {
    throw DimensionError("lift_classical: payoff operator, state and bases disagree");
  }
  if (!(spec.scale > 0)) throw InvalidInputError("lift_classical: scale must be positive");
  const Index na = Index(spec.basis_a.size()), nb = Index(spec.basis_b.size());
  const auto& p = spec.payoff_operator.matrix();
  const auto& rho0 = spec.initial_state.matrix();
  ComplexMatrix<Real> h(na * nb, na * nb);
  for (Index ia = 0; ia < na; ++ia)
    for (Index ib = 0; ib < nb; ++ib) {
      const ComplexMatrix<Real> mu = spec.basis_b[size_t(ib)] * spec.basis_a[size_t(ia)];
      for (Index ja = 0; ja < na; ++ja)
        for (Index jb = 0; jb < nb; ++jb) {
          const ComplexMatrix<Real> nu = spec.basis_b[size_t(jb)] * spec.basis_a[size_t(ja)];
          h(ia * nb + ib, ja * nb + jb) = spec.scale * (p * nu * rho0 * mu.adjoint()).trace();
        }
    }
  return QuantumGame<Real>(na, nb, HermitianOperator<Real>(h), "lift");
}

/// H = scale * diag(vec(A)) with row-major flattening; A is the classical payoff for the
/// minimizing row player.
template <typename Real>
QuantumGame<Real> classical_embed(const RealMatrix<Real>& a, Real scale, std::string label = "classical") {
  if (a.size() == 0) throw DimensionError("classical_embed: empty payoff matrix");
  const Index m = a.rows(), n = a.cols();
  ComplexMatrix<Real> h = ComplexMatrix<Real>::Zero(m * n, m * n);
  for (Index i = 0; i < m; ++i)
    for (Index k = 0; k < n; ++k) h(i * n + k, i * n + k) = scale * a(i, k);
  return QuantumGame<Real>(m, n, HermitianOperator<Real>(h), std::move(label));
}

enum class CannedGame { kPure, kDiagonal, kQuantum };

inline std::optional<CannedGame> parse_canned_game(std::string_view name) {
  if (name == "pure") return CannedGame::kPure;
  if (name == "diagonal") return CannedGame::kDiagonal;
  if (name == "quantum") return CannedGame::kQuantum;
  return std::nullopt;
}

inline const char* to_string(CannedGame g) {
  switch (g) {
    case CannedGame::kPure: return "pure";
    case CannedGame::kDiagonal: return "diagonal";
    case CannedGame::kQuantum: return "quantum";
  }
  return "?";
}

/// The three 4x4 Penny Flip subgames (payoffs scaled by 100), n_a = n_b = 2.
///   pure:     moves {I, X}
///   diagonal: the classical matching-pennies embedding
///   quantum:  moves {I, Z}
template <typename Real = double>
QuantumGame<Real> canned_game(CannedGame which) {
  using C = Complex<Real>;
  const C i(0, 1);
  ComplexMatrix<Real> h(4, 4);
  switch (which) {
    case CannedGame::kPure:
      h << 100, 0, 0, 100,
           0, -100, -100, 0,
           0, -100, -100, 0,
           100, 0, 0, 100;
      break;
    case CannedGame::kDiagonal:
      h << 100, 0, 0, 0,
           0, -100, 0, 0,
           0, 0, -100, 0,
           0, 0, 0, 100;
      break;
    case CannedGame::kQuantum:
      h << C(100), -C(100) * i, -C(100) * i, C(100),
           C(100) * i, C(-100), C(-100), -C(100) * i,
           C(100) * i, C(-100), C(-100), -C(100) * i,
           C(100), C(100) * i, C(100) * i, C(100);
      break;
  }
  return QuantumGame<Real>(2, 2, HermitianOperator<Real>(h), to_string(which));
}

template <typename Real = double>
QuantumGame<Real> canned_game(std::string_view name) {
  const auto g = parse_canned_game(name);
  if (!g) throw InvalidInputError("unknown canned game '" + std::string(name) + "'");
  return canned_game<Real>(*g);
}

}  // namespace qdecept
