#include <gtest/gtest.h>

#include "qdecept/deception.hpp"
#include "qdecept/hamiltonian.hpp"
#include "support/oracles.hpp"

using namespace qdecept;
using oracle::CMat;
using oracle::Cd;

namespace {

HermitianOperatord diag4(double a, double b, double c, double d) {
  CMat m = CMat::Zero(4, 4);
  m.diagonal() << a, b, c, d;
  return HermitianOperatord(m);
}

double tol_of(const QuantumGamed& g, double rel = 1e-4) {
  return scaled_tolerance(rel, frobenius_norm(g.hamiltonian()));
}

// Checks every documented invariant of a deception result.
void expect_well_formed(const QuantumGamed& g, double budget, const DeceptionResult<double>& r) {
  const double tol = tol_of(g);
  EXPECT_LE(induced_one_norm(r.d_star), budget + 1e-8);
  const auto announced = deceptive_game(g, r.d_star);
  EXPECT_GE(oracle::lambda_min(conditioned_operator_a(announced, r.rho_b).matrix()),
            r.perceived_value - tol);
  EXPECT_LE(oracle::lambda_max(conditioned_operator_b(announced, r.omega).matrix()),
            r.perceived_value + tol);
  EXPECT_NEAR(r.realized_payoff,
              oracle::payoff(g.hamiltonian().matrix(), r.rho_a.matrix(), r.rho_b.matrix()), 1e-9);
  EXPECT_LE(r.residuals.max(), tol);
  ASSERT_FALSE(r.best_objective_trace.empty());
  for (size_t k = 1; k < r.best_objective_trace.size(); ++k) {
    EXPECT_LE(r.best_objective_trace[k], r.best_objective_trace[k - 1] + tol);
  }
  // The deceiver best-responds on the true game.
  EXPECT_NEAR(r.realized_payoff, oracle::lambda_min(conditioned_operator_a(g, r.rho_b).matrix()),
              1e-9);
}

DeceptionInstance<double> quick(const QuantumGamed& g, double budget) {
  DeceptionInstance<double> inst{g, budget};
  inst.restarts = 4;
  inst.refine_top = 1;
  return inst;
}

}  // namespace

TEST(DeceptiveGame, ZeroAndTableDiagonal) {
  const auto g = canned_game<double>("diagonal");
  EXPECT_EQ(deceptive_game(g, HermitianOperatord::Zero(4)).hamiltonian().matrix(),
            g.hamiltonian().matrix());
  const auto h = deceptive_game(g, diag4(19.5, 19.5, -20, -20)).hamiltonian().matrix();
  CMat expected = CMat::Zero(4, 4);
  expected.diagonal() << 119.5, -80.5, -120, 80;
  EXPECT_EQ(h, expected);
}

TEST(DeceptiveGame, ConstantShiftMovesValueOnly) {
  const auto g = canned_game<double>("pure");
  const auto base = solve_equilibrium(g);
  const auto shifted_game = deceptive_game(g, HermitianOperatord::Identity(4) * 7.0);
  const auto shifted = solve_equilibrium(shifted_game);
  EXPECT_NEAR(shifted.value, base.value + 7, tol_of(g));
  EXPECT_TRUE(is_security_policy(shifted_game, Player::kB, base.rho_b, base.value + 7, tol_of(g)));
}

TEST(DeceptiveGame, Rejections) {
  const auto g = canned_game<double>("pure");
  CMat skew = CMat::Zero(4, 4);
  skew(0, 1) = 1;
  EXPECT_THROW(deceptive_game(g, skew), InvalidInputError);
  EXPECT_THROW(deceptive_game(g, HermitianOperatord::Zero(3)), DimensionError);
  EXPECT_THROW(deceptive_game(g, CMat(CMat::Zero(2, 2))), DimensionError);
}

TEST(ClipToBudget, Examples) {
  const auto inside = diag4(50, 0, 0, 0);
  EXPECT_EQ(clip_to_budget(inside, 100.0).matrix(), inside.matrix());
  const auto two = HermitianOperatord::Identity(4) * 40.0;
  EXPECT_LT((clip_to_budget(two, 20.0).matrix() - CMat::Identity(4, 4) * 20.0).norm(), 1e-12);
  EXPECT_LT((clip_to_budget(diag4(40, -40, 0, 0), 20.0).matrix() - diag4(20, -20, 0, 0).matrix())
                .norm(),
            1e-12);
  EXPECT_THROW(clip_to_budget(two, -1.0), InvalidInputError);
}

TEST(NaiveVictim, MatchingPenniesAndConstant) {
  const auto r = naive_victim_response(canned_game<double>("diagonal"));
  EXPECT_NEAR(r(0, 0).real(), 0.5, 1e-3);
  EXPECT_NEAR(r(1, 1).real(), 0.5, 1e-3);
  const QuantumGamed flat(2, 2, HermitianOperatord::Identity(4) * 3.0);
  EXPECT_LT((naive_victim_response(flat).matrix() - CMat::Identity(2, 2) * 0.5).norm(), 1e-12);
}

TEST(NaiveVictim, TableDeceptionLooksWorthlessToVictim) {
  // Announced diag(119.5, -80.5, -120, 80) has a saddle-free 2x2 value of about 0.
  const auto announced = deceptive_game(canned_game<double>("diagonal"), diag4(19.5, 19.5, -20, -20));
  const auto rb = naive_victim_response(announced);
  Eigen::Matrix2d a;
  a << 119.5, -80.5, -120, 80;
  const double ref = oracle::support_enumeration(a).value;
  EXPECT_NEAR(ref, 0.0, 0.5);
  EXPECT_NEAR(lambda_min(conditioned_operator_a(announced, rb)), ref, tol_of(announced));
}

TEST(RobustVictim, Examples) {
  const auto g = canned_game<double>("diagonal");
  const auto naive = naive_victim_response(g);
  const auto zero = robust_victim_response(g, 0.0);
  EXPECT_LT((zero.rho_b.matrix() - naive.matrix()).norm(), 1e-12);
  const auto r20 = robust_victim_response(g, 20.0);
  EXPECT_LT((r20.rho_b.matrix() - naive.matrix()).norm(), 1e-12);
  EXPECT_NEAR(r20.worst_case_value, -20.0, tol_of(g));
  const QuantumGamed flat(2, 2, HermitianOperatord::Identity(4) * 3.0);
  EXPECT_NEAR(robust_victim_response(flat, 10.0).worst_case_value, -7.0, 1e-12);
  EXPECT_THROW(robust_victim_response(g, -1.0), InvalidInputError);
}

TEST(Theorem1, ZeroHamiltonian) {
  const QuantumGamed g(2, 2, HermitianOperatord::Zero(4));
  const auto rep = verify_theorem1(g, 5.0, SolverConfig{}, 50);
  EXPECT_TRUE(rep.passed);
  EXPECT_EQ(rep.naive_value, 0.0);
  EXPECT_NEAR(rep.robust_value, -5.0, 1e-12);
}

TEST(Theorem1, PureGameGap) {
  const auto g = canned_game<double>("pure");
  const auto rep = verify_theorem1(g, 20.0, SolverConfig{}, 100);
  EXPECT_TRUE(rep.passed);
  EXPECT_NEAR(rep.naive_value - rep.robust_value, 20.0, 1e-3 * frobenius_norm(g.hamiltonian()));
  EXPECT_NEAR(rep.rayleigh_max, 20.0, 1e-9);
}

TEST(Theorem1, ScaledIdentityAttainsBudgetEverywhere) {
  oracle::Random rnd(81);
  const auto d = HermitianOperatord::Identity(4) * 13.0;
  for (int t = 0; t < 100; ++t) {
    const oracle::CVec v = rnd.unit_vector(4);
    EXPECT_NEAR(v.dot(d.matrix() * v).real(), 13.0, 1e-12);
  }
}

TEST(Theorem1, RandomGameAndZeroBudget) {
  oracle::Random rnd(82);
  EXPECT_TRUE(verify_theorem1(rnd.game(), 50.0, SolverConfig{}, 50).passed);
  const auto rep = verify_theorem1(canned_game<double>("diagonal"), 0.0, SolverConfig{}, 20);
  EXPECT_TRUE(rep.passed);
  EXPECT_NEAR(rep.naive_value - rep.robust_value, 0.0, 1e-3 * 200);
}

TEST(SolveDeception, ZeroBudgetIsUndeceivedGame) {
  const auto g = canned_game<double>("quantum");
  const auto r = solve_deception(DeceptionInstance<double>{g, 0.0});
  EXPECT_EQ(r.d_star.matrix().norm(), 0.0);
  EXPECT_NEAR(r.realized_payoff, 100.0, tol_of(g));
  EXPECT_NEAR(r.perceived_value, 100.0, tol_of(g));
  expect_well_formed(g, 0.0, r);
}

TEST(SolveDeception, DiagonalSaturates) {
  const auto g = canned_game<double>("diagonal");
  const auto r = solve_deception(DeceptionInstance<double>{g, 100.0});
  EXPECT_NEAR(r.realized_payoff, -100.0, 1.0);
  expect_well_formed(g, 100.0, r);
}

TEST(SolveDeception, QuantumReachesTwiceBudgetBound) {
  // For any product pair, |tr((rho_A x rho_B) D)| <= ||D||_1, so the victim's
  // perceived guarantee moves by at most the budget and the deceiver gains at most
  // twice the budget: realized >= 100 - 2 * budget. The phase deception
  // i*budget at (0,2) and (1,3) attains it.
  const auto g = canned_game<double>("quantum");
  for (double budget : {20.0, 40.0}) {
    const auto r = solve_deception(DeceptionInstance<double>{g, budget});
    expect_well_formed(g, budget, r);
    EXPECT_GE(r.realized_payoff, 100 - 2 * budget - tol_of(g));
    EXPECT_NEAR(r.realized_payoff, 100 - 2 * budget, 0.01 * budget) << budget;
  }
}

TEST(SolveDeception, DominatesSeededBaselines) {
  const auto g = canned_game<double>("diagonal");
  const auto baseline = solve_equilibrium(g);
  const double baseline_realized = best_response_a(g, baseline.rho_b).value;
  auto inst = quick(g, 20.0);
  inst.warm_starts = {diag4(19.5, 19.5, -20, -20)};
  const auto r = solve_deception(inst);
  expect_well_formed(g, 20.0, r);
  EXPECT_LE(r.realized_payoff, baseline_realized + tol_of(g));
  EXPECT_LE(r.realized_payoff, -19.5 + tol_of(g));
}

TEST(SolveDeception, RandomGameInvariants) {
  oracle::Random rnd(91);
  for (int t = 0; t < 3; ++t) {
    const auto g = rnd.game(2, t == 2 ? 3 : 2);
    const auto r = solve_deception(quick(g, 30.0));
    expect_well_formed(g, 30.0, r);
    const auto eq = solve_equilibrium(g);
    EXPECT_LE(r.realized_payoff, eq.value + tol_of(g));
  }
}

TEST(SolveDeception, DeterministicForSeed) {
  const auto g = oracle::Random(92).game();
  auto inst = quick(g, 25.0);
  inst.config.seed = 5;
  const auto a = solve_deception(inst);
  const auto b = solve_deception(inst);
  EXPECT_EQ(a.d_star.matrix(), b.d_star.matrix());
  EXPECT_EQ(a.realized_payoff, b.realized_payoff);
  EXPECT_EQ(a.winner, b.winner);
}

TEST(SolveDeception, InputErrors) {
  const auto g = canned_game<double>("pure");
  EXPECT_THROW(solve_deception(DeceptionInstance<double>{g, -1.0}), InvalidInputError);
  auto inst = quick(g, 10.0);
  inst.warm_starts = {HermitianOperatord::Zero(3)};
  EXPECT_THROW(solve_deception(inst), DimensionError);
  inst = quick(g, 10.0);
  inst.config.tolerance = 0;
  EXPECT_THROW(solve_deception(inst), InvalidInputError);
}

TEST(FeasibilityResiduals, ZeroAtUndeceivedEquilibrium) {
  const auto g = canned_game<double>("diagonal");
  const auto eq = solve_equilibrium(g);
  const auto ra = best_response_a(g, eq.rho_b).rho;
  const auto res = feasibility_residuals(g, HermitianOperatord::Zero(4), 0.0, ra, eq.rho_b,
                                         eq.rho_a, eq.value);
  EXPECT_LE(res.max(), tol_of(g));
  EXPECT_EQ(res.budget, 0.0);
}
