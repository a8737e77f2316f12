#pragma once

// Honey-X deception: the deceiver (player A, the minimizer) announces
// H' = H + D with ||D||_1 <= budget, the victim (player B) plays a security
// policy of H', and the deceiver best-responds on the true H.
//
// solve_deception searches the bilinear program
//   min tr((rho_A (x) rho_B) H)
//   s.t. tr_B((I (x) rho_B)(H+D)) >= u I,  tr_A((Omega (x) I)(H+D)) <= u I,
//        ||D||_1 <= budget,  rho_A, rho_B, Omega density matrices
// by alternating between the victim's equilibrium for a fixed D and a
// projected pattern search over D, started from structured and random seeds.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <utility>
#include <string>
#include <vector>

#include "qdecept/equilibrium.hpp"
#include "qdecept/hamiltonian.hpp"

namespace qdecept {

/// H + D.
template <typename Real>
QuantumGame<Real> deceptive_game(const QuantumGame<Real>& g, const HermitianOperator<Real>& d) {
  if (d.dim() != g.dim()) throw DimensionError("deceptive_game: D has the wrong dimension");
  return g.with_hamiltonian(g.hamiltonian() + d, g.label() + "+D");
}

/// Overload for raw matrices; rejects D unless D == D^H up to rounding.
template <typename Real>
QuantumGame<Real> deceptive_game(const QuantumGame<Real>& g, const ComplexMatrix<Real>& d) {
  if (d.rows() != d.cols() || d.rows() != g.dim()) {
    throw DimensionError("deceptive_game: D has the wrong dimension");
  }
  if ((d - d.adjoint()).norm() > scaled_tolerance(Real(1e-12), d.norm())) {
    throw InvalidInputError("deceptive_game: D is not Hermitian");
  }
  return deceptive_game(g, HermitianOperator<Real>(d));
}

/// Radial scaling onto {||D||_1 <= budget}.
template <typename Real>
HermitianOperator<Real> clip_to_budget(const HermitianOperator<Real>& d, Real budget) {
  if (budget < 0) throw InvalidInputError("clip_to_budget: negative budget");
  const Real n = induced_one_norm(d);
  if (n <= budget) return d;
  return d * (budget / n);
}

template <typename Real>
DensityMatrix<Real> naive_victim_response(const QuantumGame<Real>& announced,
                                          const SolverConfig& cfg = {}) {
  return solve_equilibrium(announced, cfg).rho_b;
}

template <typename Real = double>
struct RobustResponse {
  DensityMatrix<Real> rho_b;
  Real worst_case_value = 0;
};

/// The worst case over feasible deceptions of any product state is exactly
/// budget (attained by budget * I), so the robust victim plays the naive
/// strategy and guarantees the naive value minus the budget.
template <typename Real>
RobustResponse<Real> robust_victim_response(const QuantumGame<Real>& announced, Real budget,
                                            const SolverConfig& cfg = {}) {
  if (budget < 0) throw InvalidInputError("robust_victim_response: negative budget");
  const auto eq = solve_equilibrium(announced, cfg);
  return {eq.rho_b, eq.value - budget};
}

// ---------------------------------------------------------------------------
// Naive / robust equivalence check

template <typename Real = double>
struct Theorem1Report {
  bool passed = false;
  Real rayleigh_max = 0;       // largest <psi|D|psi> found over the feasible family
  Real rayleigh_residual = 0;  // max over samples |max_D <psi|D|psi> - budget|
  Real naive_value = 0;
  Real robust_value = 0;
  Real value_gap_residual = 0;     // |naive - robust - budget|
  Real cross_certificate_a = 0;    // robust strategy on the naive program (>= -tol passes)
  Real cross_certificate_b = 0;    // naive strategy on the robust program (>= -tol passes)
  Real tolerance = 0;
  std::vector<std::string> failures;
};

/// Checks on one game that a robust victim (worst case over ||D||_1 <= budget) and a naive
/// victim behave identically:
///  (a) for random product pure states the largest Rayleigh quotient over a family of
///      feasible D (budget*I, rescaled projectors, random draws) equals the budget and none
///      exceeds it;
///  (b) each response certifies as a security policy of the other program;
///  (c) robust value == naive value - budget.
/// The robust program is solved independently as the game H - budget*I.
template <typename Real>
Theorem1Report<Real> verify_theorem1(const QuantumGame<Real>& g, Real budget,
                                     const SolverConfig& cfg, int samples,
                                     std::uint64_t seed = 7) {
  if (budget < 0) throw InvalidInputError("verify_theorem1: negative budget");
  Theorem1Report<Real> rep;
  const Real hnorm = frobenius_norm(g.hamiltonian());
  rep.tolerance = scaled_tolerance(Real(1e-3), hnorm);
  const Real rayleigh_tol = scaled_tolerance(Real(1e-9), std::max(budget, Real(1)));

  std::mt19937_64 rng(seed);
  std::normal_distribution<Real> normal;
  auto random_vector = [&](Index n) {
    ComplexVector<Real> v(n);
    for (Index i = 0; i < n; ++i) v(i) = Complex<Real>(normal(rng), normal(rng));
    return ComplexVector<Real>(v / v.norm());
  };
  auto random_feasible = [&](Index n) {
    ComplexMatrix<Real> m(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) m(i, j) = Complex<Real>(normal(rng), normal(rng));
    HermitianOperator<Real> h(m);
    const Real nn = induced_one_norm(h);
    return nn > 0 ? h * (budget / nn) : h;
  };

  const Index n = g.dim();
  const auto full = HermitianOperator<Real>::Identity(n) * budget;
  for (int s = 0; s < samples; ++s) {
    const ComplexVector<Real> psi =
        kron<Real>(random_vector(g.n_a()), random_vector(g.n_b()));
    auto rq = [&](const HermitianOperator<Real>& d) {
      return std::real(psi.dot(d.matrix() * psi));
    };
    HermitianOperator<Real> proj(ComplexMatrix<Real>(psi * psi.adjoint()));
    proj = clip_to_budget(proj * (budget / std::max(induced_one_norm(proj), Real(1e-300))), budget);
    Real best = std::max(rq(full), rq(proj));
    for (int k = 0; k < 4; ++k) best = std::max(best, rq(random_feasible(n)));
    rep.rayleigh_max = std::max(rep.rayleigh_max, best);
    rep.rayleigh_residual = std::max(rep.rayleigh_residual, std::abs(best - budget));
  }
  if (rep.rayleigh_residual > rayleigh_tol) rep.failures.push_back("rayleigh quotient != budget");
  if (rep.rayleigh_max > budget + rayleigh_tol) rep.failures.push_back("rayleigh quotient > budget");

  const auto naive = solve_equilibrium(g, cfg);
  const auto robust_game =
      g.with_hamiltonian(g.hamiltonian() - HermitianOperator<Real>::Identity(n) * budget);
  const auto robust = solve_equilibrium(robust_game, cfg);
  rep.naive_value = naive.value;
  rep.robust_value = robust.value;
  rep.value_gap_residual = std::abs(naive.value - robust.value - budget);
  if (rep.value_gap_residual > rep.tolerance) rep.failures.push_back("robust value != naive - budget");

  rep.cross_certificate_a = lambda_min(conditioned_operator_a(g, robust.rho_b)) - naive.value;
  rep.cross_certificate_b =
      lambda_min(conditioned_operator_a(robust_game, naive.rho_b)) - robust.value;
  if (rep.cross_certificate_a < -rep.tolerance) {
    rep.failures.push_back("robust response is not a naive security policy");
  }
  if (rep.cross_certificate_b < -rep.tolerance) {
    rep.failures.push_back("naive response is not a robust security policy");
  }
  rep.passed = rep.failures.empty();
  return rep;
}

// ---------------------------------------------------------------------------
// Optimal deception

template <typename Real = double>
struct DeceptionInstance {
  DeceptionInstance(QuantumGame<Real> g, Real delta) : game(std::move(g)), budget(delta) {}

  QuantumGame<Real> game;
  Real budget = 0;
  SolverConfig config;
  int restarts = 16;
  long max_outer_iterations = 5000;  // pattern-search polls per refined start
  int refine_top = 4;                // best seeds handed to the local search
  bool structured_seeds = true;
  double time_cap_s = 120;
  std::vector<HermitianOperator<Real>> warm_starts;  // extra seeds, clipped to budget
};

/// Violations of the program's constraints; all zero means exactly feasible.
template <typename Real = double>
struct FeasibilityResiduals {
  Real victim_security = 0;   // max(0, u - lambda_min(tr_B((I (x) rho_B) H')))
  Real dual_certificate = 0;  // max(0, lambda_max(tr_A((Omega (x) I) H')) - u)
  Real budget = 0;            // max(0, ||D||_1 - budget)
  Real positivity = 0;        // max(0, -lambda_min) over rho_A, rho_B, Omega
  Real unit_trace = 0;        // max |tr - 1| over rho_A, rho_B, Omega

  Real max() const {
    return std::max({victim_security, dual_certificate, budget, positivity, unit_trace});
  }
};

template <typename Real = double>
struct DeceptionResult {
  HermitianOperator<Real> d_star;
  DensityMatrix<Real> rho_a;
  DensityMatrix<Real> rho_b;
  DensityMatrix<Real> omega;
  Real perceived_value = 0;
  Real realized_payoff = 0;
  FeasibilityResiduals<Real> residuals;
  int restarts_used = 0;
  int winner = 0;  // index of the seed the winning point descends from
  std::vector<Real> best_objective_trace;
  long evaluations = 0;
  bool converged = false;  // victim equilibrium of H + D* closed to tolerance
  std::vector<std::string> warnings;
};

template <typename Real>
FeasibilityResiduals<Real> feasibility_residuals(const QuantumGame<Real>& g,
                                                 const HermitianOperator<Real>& d, Real budget,
                                                 const DensityMatrix<Real>& rho_a,
                                                 const DensityMatrix<Real>& rho_b,
                                                 const DensityMatrix<Real>& omega, Real u) {
  const auto announced = deceptive_game(g, d);
  FeasibilityResiduals<Real> r;
  r.victim_security =
      std::max(Real(0), u - lambda_min(conditioned_operator_a(announced, rho_b)));
  r.dual_certificate =
      std::max(Real(0), lambda_max(conditioned_operator_b(announced, omega)) - u);
  r.budget = std::max(Real(0), induced_one_norm(d) - budget);
  for (const auto* s : {&rho_a, &rho_b, &omega}) {
    r.positivity = std::max(r.positivity, -lambda_min(s->op()));
    r.unit_trace = std::max(r.unit_trace, std::abs(s->op().trace() - Real(1)));
  }
  return r;
}

namespace detail {

/// Basis of the real vector space of n x n Hermitian matrices.
template <typename Real>
std::vector<HermitianOperator<Real>> hermitian_directions(Index n) {
  std::vector<HermitianOperator<Real>> out;
  for (Index k = 0; k < n; ++k) {
    ComplexMatrix<Real> m = ComplexMatrix<Real>::Zero(n, n);
    m(k, k) = 1;
    out.emplace_back(m);
  }
  for (Index k = 0; k < n; ++k)
    for (Index l = k + 1; l < n; ++l) {
      ComplexMatrix<Real> re = ComplexMatrix<Real>::Zero(n, n);
      re(k, l) = re(l, k) = 1;
      out.emplace_back(re);
      ComplexMatrix<Real> im = ComplexMatrix<Real>::Zero(n, n);
      im(k, l) = Complex<Real>(0, 1);
      im(l, k) = Complex<Real>(0, -1);
      out.emplace_back(im);
    }
  return out;
}

template <typename Real>
HermitianOperator<Real> to_budget(const HermitianOperator<Real>& d, Real budget) {
  const Real n = induced_one_norm(d);
  return n > 0 ? d * (budget / n) : d;
}

/// Structured seeds: sign patterns on the diagonal, one conjugate pair (real or
/// imaginary) per off-diagonal position, and for qubit games every Pauli product,
/// all saturating the budget.
template <typename Real>
std::vector<HermitianOperator<Real>> structured_seeds(const QuantumGame<Real>& g, Real budget) {
  const Index n = g.dim();
  std::vector<HermitianOperator<Real>> out;
  const Index patterns = n <= 6 ? (Index(1) << n) : 64;
  for (Index mask = 0; mask < patterns; ++mask) {
    ComplexMatrix<Real> m = ComplexMatrix<Real>::Zero(n, n);
    for (Index k = 0; k < n; ++k) m(k, k) = ((mask >> (k % 62)) & 1) ? -budget : budget;
    out.emplace_back(m);
  }
  for (Index k = 0; k < n; ++k)
    for (Index l = k + 1; l < n; ++l)
      for (const Complex<Real> z : {Complex<Real>(1, 0), Complex<Real>(-1, 0),
                                    Complex<Real>(0, 1), Complex<Real>(0, -1)}) {
        ComplexMatrix<Real> m = ComplexMatrix<Real>::Zero(n, n);
        m(k, l) = budget * z;
        m(l, k) = budget * std::conj(z);
        out.emplace_back(m);
      }
  if (g.n_a() == 2 && g.n_b() == 2) {
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        if (a == 0 && b == 0) continue;
        const ComplexMatrix<Real> p =
            kron<Real>(Pauli<Real>::by_index(a), Pauli<Real>::by_index(b));
        out.emplace_back(ComplexMatrix<Real>(p * budget));
        out.emplace_back(ComplexMatrix<Real>(-p * budget));
      }
  }
  return out;
}

template <typename Real>
struct Evaluation {
  HermitianOperator<Real> d;
  Real realized = std::numeric_limits<Real>::infinity();
  Real lower = 0;  // victim's guaranteed perceived payoff
  Real upper = 0;  // Omega's certificate
  DensityMatrix<Real> rho_a, rho_b, omega;
  int origin = 0;
};

/// Victim equilibrium of H + D with the deceiver-favourable choice among the
/// victim's optimal strategies, then the deceiver's best response on H.
template <typename Real>
Evaluation<Real> evaluate_deception(const QuantumGame<Real>& g, const HermitianOperator<Real>& d,
                                    const SolverConfig& cfg) {
  const auto announced = deceptive_game(g, d);
  const auto eq = run_equilibrium(announced, cfg);
  const Real tol = scaled_tolerance(Real(cfg.tolerance), frobenius_norm(announced.hamiltonian()));

  Evaluation<Real> ev;
  ev.d = d;
  ev.omega = eq.rho_a;
  ev.upper = eq.upper;
  ev.rho_b = eq.rho_b;
  ev.lower = eq.lower;
  auto br = best_response_a(g, ev.rho_b);
  ev.realized = br.value;
  ev.rho_a = br.rho;

  // Optimistic tie-breaking. The victim's optimal set is probed by re-solving
  // H' - s (I (x) C) with C = K_B(rho_A) on the true game: among strategies that
  // stay certificate-feasible for H', this favours the ones with low true payoff
  // against the deceiver's current reply.
  const Real hscale = frobenius_norm(g.hamiltonian());
  if (hscale == 0) return ev;
  const auto id_a = ComplexMatrix<Real>::Identity(g.n_a(), g.n_a());
  for (int round = 0; round < 2; ++round) {
    const auto c = conditioned_operator_b(g, ev.rho_a);
    const Real cn = frobenius_norm(c);
    if (cn == 0) break;
    bool improved = false;
    for (const Real rel : {Real(5e-2), Real(5e-3), Real(5e-4)}) {
      const Real s = rel * hscale / cn;
      const HermitianOperator<Real> pert(ComplexMatrix<Real>(kron<Real>(id_a, c.matrix()) * s));
      const auto tilted = run_equilibrium(announced.with_hamiltonian(announced.hamiltonian() - pert), cfg);
      const Real cert = lambda_min(conditioned_operator_a(announced, tilted.rho_b));
      if (cert < ev.lower - tol) continue;
      const auto cand = best_response_a(g, tilted.rho_b);
      if (cand.value < ev.realized) {
        ev.realized = cand.value;
        ev.rho_a = cand.rho;
        ev.rho_b = tilted.rho_b;
        ev.lower = std::max(ev.lower, cert);
        improved = true;
      }
      break;
    }
    if (!improved) break;
  }
  ev.lower = std::min(ev.lower, lambda_min(conditioned_operator_a(announced, ev.rho_b)));
  return ev;
}

}  // namespace detail

/// Best deception found over structured seeds, random restarts and warm starts,
/// each of the most promising refined by projected pattern search. Global
/// optimality is not certified; the returned point is feasible to tolerance and
/// no worse than any seed it evaluated (including D = 0).
template <typename Real>
DeceptionResult<Real> solve_deception(const DeceptionInstance<Real>& inst) {
  using Op = HermitianOperator<Real>;
  const auto& g = inst.game;
  const Real budget = inst.budget;
  if (!(budget >= 0)) throw InvalidInputError("solve_deception: budget must be >= 0");
  if (!(inst.config.tolerance > 0)) throw InvalidInputError("solve_deception: tolerance must be > 0");
  const auto started = std::chrono::steady_clock::now();
  auto out_of_time = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count() >
           inst.time_cap_s;
  };

  const Index n = g.dim();
  const Real hscale = std::max(frobenius_norm(g.hamiltonian()), Real(1));
  // Gains below the evaluation accuracy are tie-breaking noise, not progress.
  const Real min_gain = scaled_tolerance(Real(inst.config.tolerance), hscale);

  DeceptionResult<Real> res;
  std::vector<Op> seeds{Op::Zero(n)};
  if (budget > 0) {
    if (inst.structured_seeds) {
      for (auto& s : detail::structured_seeds(g, budget)) seeds.push_back(std::move(s));
    }
    std::mt19937_64 rng(inst.config.seed);
    std::normal_distribution<Real> normal;
    for (int r = 0; r < inst.restarts; ++r) {
      ComplexMatrix<Real> m(n, n);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) m(i, j) = Complex<Real>(normal(rng), normal(rng));
      seeds.push_back(detail::to_budget(Op(m), budget));
      ++res.restarts_used;
    }
  }
  // Each warm start as given and, when it leaves budget unused, stretched onto the boundary.
  const size_t first_warm = seeds.size();
  for (const auto& w : inst.warm_starts) {
    if (w.dim() != n) throw DimensionError("solve_deception: warm start has the wrong dimension");
    seeds.push_back(clip_to_budget(w, budget));
    const Real norm = induced_one_norm(w);
    if (norm > 0 && norm < budget) seeds.push_back(w * (budget / norm));
  }

  Real best_so_far = std::numeric_limits<Real>::infinity();
  auto record = [&](Real v) {
    best_so_far = std::min(best_so_far, v);
    res.best_objective_trace.push_back(best_so_far);
  };

  std::vector<detail::Evaluation<Real>> evaluated;
  evaluated.reserve(seeds.size());
  for (size_t k = 0; k < seeds.size(); ++k) {
    if (k > 0 && out_of_time()) {
      res.warnings.push_back("time cap reached while evaluating seeds");
      break;
    }
    auto ev = detail::evaluate_deception(g, seeds[k], inst.config);
    ev.origin = int(k);
    ++res.evaluations;
    record(ev.realized);
    evaluated.push_back(std::move(ev));
  }
  // Stable order: objective, then seed index.
  std::stable_sort(evaluated.begin(), evaluated.end(),
                   [](const auto& x, const auto& y) { return x.realized < y.realized; });

  // Candidates for the final fine-tolerance comparison: the best seeds and every
  // refined point. Optimistic tie-breaking is only as sharp as the solver
  // tolerance, so close coarse values are re-ranked at a tighter one.
  std::vector<detail::Evaluation<Real>> finalists(
      evaluated.begin(),
      evaluated.begin() + std::min<std::ptrdiff_t>(2 * std::max(inst.refine_top, 1),
                                                   std::ptrdiff_t(evaluated.size())));
  // Warm starts always compete, so a larger budget never loses a smaller one's answer.
  for (size_t k = finalists.size(); k < evaluated.size(); ++k) {
    if (size_t(evaluated[k].origin) >= first_warm) finalists.push_back(evaluated[k]);
  }
  if (budget > 0) {
    const auto dirs = detail::hermitian_directions<Real>(n);
    const int tops = std::min<int>(inst.refine_top, int(evaluated.size()));
    for (int t = 0; t < tops && !out_of_time(); ++t) {
      auto cur = evaluated[size_t(t)];
      Real step = Real(0.25) * budget;
      long polls = 0;
      while (step > Real(1e-3) * budget && polls < inst.max_outer_iterations) {
        if (out_of_time()) {
          res.warnings.push_back("time cap reached during refinement");
          break;
        }
        ++polls;
        bool moved = false;
        for (const auto& dir : dirs) {
          for (const Real sign : {Real(1), Real(-1)}) {
            Op trial = clip_to_budget(cur.d + dir * (sign * step), budget);
            auto ev = detail::evaluate_deception(g, trial, inst.config);
            ++res.evaluations;
            if (ev.realized < cur.realized - min_gain) {
              ev.origin = cur.origin;
              cur = std::move(ev);
              record(cur.realized);
              moved = true;
              break;
            }
          }
          if (moved) break;
        }
        if (!moved) step /= 2;
      }
      if (polls >= inst.max_outer_iterations) {
        res.warnings.push_back("refinement hit the outer iteration cap");
      }
      finalists.push_back(std::move(cur));
    }
  }

  // Re-solve the finalists at a hundred times tighter tolerance and keep the best.
  SolverConfig fine = inst.config;
  fine.tolerance = inst.config.tolerance / 100;
  std::optional<detail::Evaluation<Real>> chosen;
  for (const auto& cand : finalists) {
    auto ev = detail::evaluate_deception(g, cand.d, fine);
    ++res.evaluations;
    if (ev.realized > cand.realized) {
      // The coarse pass may have found a slightly better optimistic tie-break; keep its
      // strategies but refresh the certificate at the fine tolerance.
      ev.rho_a = cand.rho_a;
      ev.rho_b = cand.rho_b;
      ev.realized = cand.realized;
      ev.lower = lambda_min(conditioned_operator_a(deceptive_game(g, cand.d), cand.rho_b));
    }
    ev.origin = cand.origin;
    if (!chosen || ev.realized < chosen->realized) chosen = std::move(ev);
  }
  auto& final_ev = *chosen;

  res.d_star = final_ev.d;
  res.rho_a = final_ev.rho_a;
  res.rho_b = final_ev.rho_b;
  res.omega = final_ev.omega;
  res.perceived_value = (final_ev.lower + final_ev.upper) / 2;
  res.realized_payoff = payoff(g, res.rho_a, res.rho_b);
  res.winner = final_ev.origin;
  res.residuals = feasibility_residuals(g, res.d_star, budget, res.rho_a, res.rho_b, res.omega,
                                        res.perceived_value);
  record(res.realized_payoff);
  res.converged = final_ev.upper - final_ev.lower <=
                  scaled_tolerance(Real(inst.config.tolerance),
                                   frobenius_norm(deceptive_game(g, res.d_star).hamiltonian()));
  if (!res.converged) res.warnings.push_back("victim equilibrium did not close to tolerance");
  return res;
}

}  // namespace qdecept
