#pragma once

// Security policies and values of zero-sum quantum games.
//
// For a fixed opponent state, a player's best response is an extreme
// eigenvector of the conditioned operator, so the game value is
//   max_{rho_B} lambda_min(K_A(rho_B)) = min_{rho_A} lambda_max(K_B(rho_A)).
// solve_equilibrium approaches both sides with matrix multiplicative weights
// and stops once the pair of operator-inequality certificates closes to
// tolerance.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "qdecept/game.hpp"

namespace qdecept {

enum class StepSchedule {
  kMirrorProx,   // extragradient MMW, constant step eta0
  kInverseSqrt,  // plain MMW (dual averaging), step eta0 / sqrt(t)
};

struct SolverConfig {
  long max_iterations = 200000;
  double tolerance = 1e-4;  // on the duality gap, relative to ||H||_F
  StepSchedule schedule = StepSchedule::kMirrorProx;
  double eta0 = 0;          // 0 selects 1 / ||H||_F
  int check_every = 32;
  int grid_resolution = 64;
  std::uint64_t seed = 0;
};

enum class Player { kA, kB };

template <typename Real = double>
struct BestResponse {
  DensityMatrix<Real> rho;
  Real value = 0;
  bool tie = false;  // the extreme eigenvalue is degenerate
};

/// Residuals of  K_A(rho_B) >= u I  and  K_B(rho_A) <= u I.
template <typename Real = double>
struct Certificate {
  Real residual_a = 0;  // lambda_min(K_A(rho_B) - u I), feasible when >= -tol
  Real residual_b = 0;  // lambda_max(K_B(rho_A) - u I), feasible when <= tol
};

template <typename Real = double>
struct EquilibriumResult {
  Real value = 0;
  Real lower = 0;  // lambda_min(K_A(rho_b)): payoff B guarantees
  Real upper = 0;  // lambda_max(K_B(rho_a)): payoff A concedes at most
  DensityMatrix<Real> rho_a;
  DensityMatrix<Real> rho_b;
  Real duality_gap = 0;
  long iterations = 0;
  Certificate<Real> certificate;
  bool converged = false;
  bool tie_a = false;
  bool tie_b = false;
};

template <typename Real>
BestResponse<Real> best_response_a(const QuantumGame<Real>& g, const DensityMatrix<Real>& rho_b) {
  const auto k = conditioned_operator_a(g, rho_b);
  const auto e = eig_hermitian(k);
  BestResponse<Real> out;
  out.value = e.values(0);
  out.rho = DensityMatrix<Real>::projector(e.vectors.col(0));
  out.tie = e.values.size() > 1 &&
            e.values(1) - e.values(0) <= scaled_tolerance(Real(1e-9), frobenius_norm(k));
  return out;
}

template <typename Real>
BestResponse<Real> best_response_b(const QuantumGame<Real>& g, const DensityMatrix<Real>& rho_a) {
  const auto k = conditioned_operator_b(g, rho_a);
  const auto e = eig_hermitian(k);
  const Index top = e.values.size() - 1;
  // Among degenerate maxima take the lowest-index eigenvector in Jacobi order.
  const Real tie_tol = scaled_tolerance(Real(1e-9), frobenius_norm(k));
  Index pick = top;
  while (pick > 0 && e.values(top) - e.values(pick - 1) <= tie_tol) --pick;
  BestResponse<Real> out;
  out.value = e.values(top);
  out.rho = DensityMatrix<Real>::projector(e.vectors.col(pick));
  out.tie = pick != top;
  return out;
}

/// Upper/lower values certified by a strategy pair.
template <typename Real>
EquilibriumResult<Real> certify(const QuantumGame<Real>& g, const DensityMatrix<Real>& rho_a,
                                const DensityMatrix<Real>& rho_b) {
  EquilibriumResult<Real> r;
  r.rho_a = rho_a;
  r.rho_b = rho_b;
  r.lower = lambda_min(conditioned_operator_a(g, rho_b));
  r.upper = lambda_max(conditioned_operator_b(g, rho_a));
  r.value = (r.lower + r.upper) / 2;
  r.duality_gap = r.upper - r.lower;
  r.certificate.residual_a = r.lower - r.value;
  r.certificate.residual_b = r.upper - r.value;
  return r;
}

/// Membership test for the security-policy set via the operator inequalities.
template <typename Real>
bool is_security_policy(const QuantumGame<Real>& g, Player who, const DensityMatrix<Real>& rho,
                        Real value, Real tol) {
  if (who == Player::kB) return lambda_min(conditioned_operator_a(g, rho)) >= value - tol;
  return lambda_max(conditioned_operator_b(g, rho)) <= value + tol;
}

namespace detail {

template <typename Real>
HermitianOperator<Real> centered(const HermitianOperator<Real>& l) {
  return l - HermitianOperator<Real>::Identity(l.dim()) * (l.trace() / Real(l.dim()));
}

template <typename Real>
struct RunningAverage {
  ComplexMatrix<Real> sum;
  Real weight = 0;
  void add(const DensityMatrix<Real>& r) {
    if (weight == 0) sum = r.matrix();
    else sum += r.matrix();
    weight += 1;
  }
  DensityMatrix<Real> get() const {
    return DensityMatrix<Real>(HermitianOperator<Real>(ComplexMatrix<Real>(sum / weight)));
  }
};

/// Core iteration; never throws on non-convergence (result.converged says).
template <typename Real>
EquilibriumResult<Real> run_equilibrium(const QuantumGame<Real>& g, const SolverConfig& cfg) {
  using Op = HermitianOperator<Real>;
  const Real hnorm = frobenius_norm(g.hamiltonian());
  const Real tol = scaled_tolerance(Real(cfg.tolerance), hnorm);
  auto best_a = DensityMatrix<Real>::maximally_mixed(g.n_a());
  auto best_b = DensityMatrix<Real>::maximally_mixed(g.n_b());
  Real upper = lambda_max(conditioned_operator_b(g, best_a));
  Real lower = lambda_min(conditioned_operator_a(g, best_b));

  auto finish = [&](long iters) {
    EquilibriumResult<Real> r;
    r.rho_a = best_a;
    r.rho_b = best_b;
    r.upper = upper;
    r.lower = lower;
    r.value = (upper + lower) / 2;
    r.duality_gap = std::max(upper - lower, Real(0));
    r.certificate.residual_a = lower - r.value;
    r.certificate.residual_b = upper - r.value;
    r.iterations = iters;
    r.converged = upper - lower <= tol;
    return r;
  };
  if (upper - lower <= tol) return finish(0);

  const Real eta = cfg.eta0 > 0 ? Real(cfg.eta0) : Real(1) / hnorm;
  Op logit_a = Op::Zero(g.n_a());  // rho_A = exp(-logit_a)/Z
  Op logit_b = Op::Zero(g.n_b());  // rho_B = exp(+logit_b)/Z
  Op sum_ka = Op::Zero(g.n_a());
  Op sum_kb = Op::Zero(g.n_b());
  RunningAverage<Real> avg_a, avg_b;
  auto x_a = best_a;
  auto x_b = best_b;

  auto consider = [&](const DensityMatrix<Real>& ca, const DensityMatrix<Real>& cb) {
    const Real u = lambda_max(conditioned_operator_b(g, ca));
    if (u < upper) {
      upper = u;
      best_a = ca;
    }
    const Real l = lambda_min(conditioned_operator_a(g, cb));
    if (l > lower) {
      lower = l;
      best_b = cb;
    }
  };

  const long check_every = std::max(1, cfg.check_every);
  for (long t = 1; t <= cfg.max_iterations; ++t) {
    if (cfg.schedule == StepSchedule::kMirrorProx) {
      const Op ka = conditioned_operator_a(g, x_b);
      const Op kb = conditioned_operator_b(g, x_a);
      const auto h_a = DensityMatrix<Real>::gibbs(-(logit_a + ka * eta));
      const auto h_b = DensityMatrix<Real>::gibbs(logit_b + kb * eta);
      logit_a = centered(logit_a + conditioned_operator_a(g, h_b) * eta);
      logit_b = centered(logit_b + conditioned_operator_b(g, h_a) * eta);
      avg_a.add(h_a);
      avg_b.add(h_b);
    } else {
      sum_ka = centered(sum_ka + conditioned_operator_a(g, x_b));
      sum_kb = centered(sum_kb + conditioned_operator_b(g, x_a));
      avg_a.add(x_a);
      avg_b.add(x_b);
      const Real step = eta / std::sqrt(Real(t));
      logit_a = sum_ka * step;
      logit_b = sum_kb * step;
    }
    x_a = DensityMatrix<Real>::gibbs(-logit_a);
    x_b = DensityMatrix<Real>::gibbs(logit_b);

    if (t % check_every == 0 || t == cfg.max_iterations) {
      consider(avg_a.get(), avg_b.get());
      consider(x_a, x_b);
      if (upper - lower <= tol) return finish(t);
    }
  }
  return finish(cfg.max_iterations);
}

}  // namespace detail

/// Value and security policies of g.
///
/// Throws InvalidInputError for a non-positive tolerance or iteration cap, and
/// ConvergenceError (carrying the best duality gap reached) when the gap does
/// not close within cfg.max_iterations.
template <typename Real>
EquilibriumResult<Real> solve_equilibrium(const QuantumGame<Real>& g, const SolverConfig& cfg = {}) {
  if (!(cfg.tolerance > 0) || cfg.max_iterations < 1) {
    throw InvalidInputError("solve_equilibrium: tolerance and max_iterations must be positive");
  }
  auto r = detail::run_equilibrium(g, cfg);
  if (!r.converged) {
    throw ConvergenceError("solve_equilibrium: duality gap " + std::to_string(double(r.duality_gap)) +
                               " above tolerance after " + std::to_string(r.iterations) +
                               " iterations",
                           double(r.duality_gap));
  }
  r.tie_a = best_response_a(g, r.rho_b).tie;
  r.tie_b = best_response_b(g, r.rho_a).tie;
  return r;
}

// ---------------------------------------------------------------------------
// Pure-state grid oracle (qubit players only)

template <typename Real = double>
struct ValueBracket {
  Real lower = 0;  // max over B-grid of min over A-grid
  Real upper = 0;  // min over A-grid of max over B-grid
};

/// Grid spacing bound for brute_force_value: ||H||_F times the coarser of the
/// theta and phi steps.
template <typename Real>
Real grid_lipschitz_tolerance(const QuantumGame<Real>& g, int resolution) {
  const Real pi = Real(3.14159265358979323846);
  const Real spacing = std::max(pi / Real(resolution - 1), Real(2) * pi / Real(resolution));
  return frobenius_norm(g.hamiltonian()) * spacing;
}

/// Enumerates cos(t/2)|0> + e^{ip} sin(t/2)|1> on a resolution x resolution (t, p) grid
/// for each player and evaluates <psi_A psi_B|H|psi_A psi_B> exhaustively.
template <typename Real>
ValueBracket<Real> brute_force_value(const QuantumGame<Real>& g, int resolution) {
  if (g.n_a() != 2 || g.n_b() != 2) {
    throw DimensionError("brute_force_value: grid oracle requires qubit players");
  }
  if (resolution < 2) throw InvalidInputError("brute_force_value: resolution must be >= 2");
  using C = Complex<Real>;
  const Real pi = Real(3.14159265358979323846);
  std::vector<C> c0, c1;
  for (int it = 0; it < resolution; ++it) {
    const Real theta = pi * Real(it) / Real(resolution - 1);
    for (int ip = 0; ip < resolution; ++ip) {
      const Real phi = Real(2) * pi * Real(ip) / Real(resolution);
      c0.emplace_back(std::cos(theta / 2), 0);
      c1.push_back(std::polar(std::sin(theta / 2), phi));
    }
  }
  const auto& h = g.hamiltonian().matrix();
  const size_t n = c0.size();

  // Reduced 2x2 form seen by one player once the other's pure state is fixed.
  // fix_first = true: <psi (x) x| H |psi (x) x> as a form in x.
  auto reduced = [&](size_t s, bool fix_first, C& m00, C& m01, C& m11) {
    const C v[2] = {c0[s], c1[s]};
    auto at = [&](int a, int b, int c, int d) {
      return fix_first ? h(a * 2 + b, c * 2 + d) : h(b * 2 + a, d * 2 + c);
    };
    auto entry = [&](int x, int y) {
      C acc(0);
      for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c) acc += std::conj(v[a]) * at(a, x, c, y) * v[c];
      return acc;
    };
    m00 = entry(0, 0);
    m01 = entry(0, 1);
    m11 = entry(1, 1);
  };
  // <x|M|x> = m00 |x0|^2 + m11 |x1|^2 + 2 Re(m01 conj(x0) x1), one array expression per state.
  using Array = Eigen::Array<Real, Eigen::Dynamic, 1>;
  Array p(n), q(n), wr(n), wi(n);
  for (size_t s = 0; s < n; ++s) {
    const C w = std::conj(c0[s]) * c1[s];
    p(Index(s)) = std::norm(c0[s]);
    q(Index(s)) = std::norm(c1[s]);
    wr(Index(s)) = Real(2) * w.real();
    wi(Index(s)) = Real(2) * w.imag();
  }
  auto forms = [&](const C& m00, const C& m01, const C& m11) {
    return p * std::real(m00) + q * std::real(m11) + wr * m01.real() - wi * m01.imag();
  };

  ValueBracket<Real> out;
  out.upper = std::numeric_limits<Real>::infinity();
  out.lower = -std::numeric_limits<Real>::infinity();
  for (size_t sa = 0; sa < n; ++sa) {
    C m00, m01, m11;
    reduced(sa, true, m00, m01, m11);
    out.upper = std::min(out.upper, Real(forms(m00, m01, m11).maxCoeff()));
  }
  for (size_t sb = 0; sb < n; ++sb) {
    C m00, m01, m11;
    reduced(sb, false, m00, m01, m11);
    out.lower = std::max(out.lower, Real(forms(m00, m01, m11).minCoeff()));
  }
  return out;
}

}  // namespace qdecept
