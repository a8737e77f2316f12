#include <gtest/gtest.h>

#include "qdecept/equilibrium.hpp"
#include "qdecept/hamiltonian.hpp"
#include "support/oracles.hpp"

using namespace qdecept;
using oracle::CMat;
using oracle::Cd;

TEST(CannedGame, PureMatrix) {
  const auto g = canned_game<double>("pure");
  const auto& h = g.hamiltonian().matrix();
  EXPECT_EQ(g.n_a(), 2);
  EXPECT_EQ(g.n_b(), 2);
  const double diag[] = {100, -100, -100, 100};
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(h(k, k), Cd(diag[k], 0));
    EXPECT_EQ(h(k, 3 - k), Cd(diag[k], 0));
  }
  int nonzero = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) nonzero += h(i, j) != Cd(0, 0);
  EXPECT_EQ(nonzero, 8);
}

TEST(CannedGame, DiagonalMatrix) {
  CMat expected = CMat::Zero(4, 4);
  expected.diagonal() << 100, -100, -100, 100;
  EXPECT_EQ(canned_game<double>("diagonal").hamiltonian().matrix(), expected);
}

TEST(CannedGame, QuantumMatrix) {
  const auto g = canned_game<double>("quantum");
  const auto& h = g.hamiltonian().matrix();
  EXPECT_EQ(h(0, 0), Cd(100, 0));
  EXPECT_EQ(h(0, 1), Cd(0, -100));
  EXPECT_EQ(h(0, 2), Cd(0, -100));
  EXPECT_EQ(h(0, 3), Cd(100, 0));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_EQ(h(i, j), std::conj(h(j, i)));
}

TEST(CannedGame, UnknownName) {
  EXPECT_THROW(canned_game<double>("penny"), InvalidInputError);
  EXPECT_FALSE(parse_canned_game("Pure").has_value());
}

TEST(StrategyBasis, RejectsNonUnitary) {
  CMat m = CMat::Identity(2, 2) * 2.0;
  EXPECT_THROW(StrategyBasis<double>({m}, {"2I"}), InvalidInputError);
  EXPECT_THROW(StrategyBasis<double>::pauli("IQ"), InvalidInputError);
  EXPECT_THROW(StrategyBasis<double>({}, {}), InvalidInputError);
}

namespace {

LiftSpec<double> flip_spec(const char* letters, double scale) {
  CMat p = CMat::Zero(2, 2);
  p(0, 0) = 1;
  p(1, 1) = -1;
  return {HermitianOperatord(p), PureStated::basis(2, 0).density(),
          StrategyBasis<double>::pauli(letters), StrategyBasis<double>::pauli(letters), scale};
}

}  // namespace

TEST(LiftClassical, DiagonalByHand) {
  // Pure moves on a coin starting heads: (I,I) and (X,X) leave heads (+100),
  // one flip gives tails (-100).
  const auto g = lift_classical(flip_spec("IX", 100));
  const double expected[] = {100, -100, -100, 100};
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(g.hamiltonian()(k, k).real(), expected[k], 1e-12);
}

TEST(LiftClassical, ReproducesPureGame) {
  const auto g = lift_classical(flip_spec("IX", 100));
  EXPECT_LT((g.hamiltonian().matrix() - canned_game<double>("pure").hamiltonian().matrix()).norm(),
            1e-9);
}

TEST(LiftClassical, SingleStrategy) {
  const auto g = lift_classical(flip_spec("I", 100));
  ASSERT_EQ(g.dim(), 1);
  EXPECT_NEAR(g.hamiltonian()(0, 0).real(), 100.0, 1e-12);
}

TEST(LiftClassical, LinearInScale) {
  const auto unit = lift_classical(flip_spec("IX", 1));
  const auto hundred = lift_classical(flip_spec("IX", 100));
  EXPECT_LT((unit.hamiltonian().matrix() * 100.0 - hundred.hamiltonian().matrix()).norm(), 1e-10);
}

TEST(LiftClassical, RejectsBadSpec) {
  auto spec = flip_spec("IX", 0);
  EXPECT_THROW(lift_classical(spec), InvalidInputError);
  spec = flip_spec("IX", 1);
  spec.initial_state = DensityMatrixd::maximally_mixed(3);
  EXPECT_THROW(lift_classical(spec), DimensionError);
}

TEST(ClassicalEmbed, MatchingPennies) {
  Eigen::MatrixXd a(2, 2);
  a << 1, -1, -1, 1;
  EXPECT_EQ(classical_embed(RealMatrix<double>(a), 100.0).hamiltonian().matrix(),
            canned_game<double>("diagonal").hamiltonian().matrix());
}

TEST(ClassicalEmbed, ZeroAndScalar) {
  const auto z = classical_embed(RealMatrix<double>(Eigen::MatrixXd::Zero(2, 3)), 7.0);
  EXPECT_EQ(z.n_a(), 2);
  EXPECT_EQ(z.n_b(), 3);
  EXPECT_EQ(z.hamiltonian().matrix().norm(), 0.0);
  Eigen::MatrixXd five(1, 1);
  five << 5;
  EXPECT_EQ(classical_embed(RealMatrix<double>(five), 1.0).hamiltonian()(0, 0), Cd(5, 0));
}

TEST(ClassicalEmbed, ValueMatchesSupportEnumeration) {
  oracle::Random rnd(41);
  for (int t = 0; t < 40; ++t) {
    Eigen::Matrix2d a;
    for (int i = 0; i < 4; ++i) a(i / 2, i % 2) = rnd.uniform(-1, 1);
    const double scale = 100;
    const auto ref = oracle::support_enumeration(a);
    const auto g = classical_embed(RealMatrix<double>(a), scale);
    const auto eq = solve_equilibrium(g);
    EXPECT_NEAR(eq.value, scale * ref.value, 1e-4 * frobenius_norm(g.hamiltonian())) << a;
  }
}
