#include "cds/dantzig_lp.hpp"
#include "cds/lp_solver.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <limits>

using namespace cds;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

LpProblem make_lp(Vector c, Matrix a, Vector l, Vector u) {
  LpProblem lp;
  lp.objective = std::move(c);
  lp.constraint_matrix = std::move(a);
  lp.lower_bounds = std::move(l);
  lp.upper_bounds = std::move(u);
  return lp;
}

}  // namespace

TEST(LpSolver, ForcedObjectiveOnSegment) {
  Matrix a(1, 2);
  a << 1, 1;
  const LpSolution s = solve_lp(make_lp(Vector::Ones(2), a, Vector::Ones(1), Vector::Ones(1)));
  ASSERT_EQ(s.status, LpStatus::optimal);
  EXPECT_NEAR(s.objective_value, 1.0, 1e-12);
  EXPECT_NEAR(s.z.sum(), 1.0, 1e-12);
}

TEST(LpSolver, SingleVariableRange) {
  Matrix a(1, 1);
  a << 1;
  const LpSolution s = solve_lp(make_lp(Vector::Ones(1), a, Vector::Constant(1, 2.0), Vector::Constant(1, 5.0)));
  ASSERT_EQ(s.status, LpStatus::optimal);
  EXPECT_NEAR(s.z(0), 2.0, 1e-12);
}

TEST(LpSolver, ReportsInfeasible) {
  Matrix a(2, 1);
  a << 1, 1;
  Vector l(2), u(2);
  l << 0, 3;
  u << 1, 4;
  EXPECT_EQ(solve_lp(make_lp(Vector::Ones(1), a, l, u)).status, LpStatus::infeasible);
}

TEST(LpSolver, ReportsUnbounded) {
  Matrix a(1, 2);
  a << 1, -1;
  const LpSolution s = solve_lp(make_lp(Vector::Constant(2, -1.0), a, Vector::Zero(1), Vector::Ones(1)));
  EXPECT_EQ(s.status, LpStatus::unbounded);
}

TEST(LpSolver, RejectsMalformedProblems) {
  Matrix a(1, 2);
  a << 1, 1;
  EXPECT_THROW(solve_lp(make_lp(Vector::Ones(3), a, Vector::Zero(1), Vector::Ones(1))), Error);
  EXPECT_THROW(solve_lp(make_lp(Vector::Ones(2), a, Vector::Ones(1), Vector::Zero(1))), Error);
  EXPECT_THROW(solve_lp(make_lp(Vector::Ones(2), a, Vector::Constant(1, kInf), Vector::Constant(1, kInf))), Error);
}

TEST(LpSolver, MatchesVertexEnumerationOnRandomLps) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Index m = 1 + static_cast<Index>(seed % 6);
    const Index k = 1 + static_cast<Index>((seed * 7) % 8);
    const LpProblem lp = oracle::random_lp(m, k, seed);
    const auto expected = oracle::lp_minimum(lp);
    ASSERT_TRUE(expected.has_value()) << "seed " << seed;
    const LpSolution s = solve_lp(lp);
    ASSERT_EQ(s.status, LpStatus::optimal) << "seed " << seed;
    EXPECT_NEAR(s.objective_value, *expected, 1e-6) << "seed " << seed;
    EXPECT_LE(s.primal_residual, 1e-9);
    EXPECT_LE(s.optimality_gap, 1e-9 * std::max(1.0, std::abs(s.objective_value)));
  }
}

TEST(LpSolver, ObjectiveScalingEquivariance) {
  const LpProblem lp = oracle::random_lp(5, 6, 99);
  LpProblem scaled = lp;
  scaled.objective *= 3.5;
  const LpSolution a = solve_lp(lp);
  const LpSolution b = solve_lp(scaled);
  ASSERT_EQ(a.status, LpStatus::optimal);
  ASSERT_EQ(b.status, LpStatus::optimal);
  EXPECT_NEAR(b.objective_value, 3.5 * a.objective_value, 1e-8 * std::max(1.0, std::abs(b.objective_value)));
}

TEST(LpSolver, DeterministicAndWarmStartAgrees) {
  const LpProblem lp = oracle::random_lp(6, 8, 5);
  const LpSolution a = solve_lp(lp);
  const LpSolution b = solve_lp(lp);
  ASSERT_EQ(a.status, LpStatus::optimal);
  EXPECT_EQ(a.z, b.z);
  LpOptions warm;
  warm.warm_start = &a.basis;
  const LpSolution c = solve_lp(lp, warm);
  ASSERT_EQ(c.status, LpStatus::optimal);
  EXPECT_NEAR(c.objective_value, a.objective_value, 1e-9);
  EXPECT_LE(c.iterations, 1);
  // A basis of the wrong shape falls back to a cold start.
  LpBasis wrong;
  wrong.variables.assign(2, BasisStatus::basic);
  warm.warm_start = &wrong;
  EXPECT_NEAR(solve_lp(lp, warm).objective_value, a.objective_value, 1e-9);
}

TEST(DantzigLp, HugeBoundGivesZero) {
  Matrix x(3, 1);
  x << 1, 2, -1;
  const DesignMatrix d = rescale_columns(DesignMatrix(x));
  Vector y(3);
  y << 1, 0, 2;
  const LpSolution s = solve_lp(dantzig_lp_reformulation(d, y, Vector::Constant(1, 1e6)));
  ASSERT_EQ(s.status, LpStatus::optimal);
  EXPECT_NEAR(split_to_beta(s.z)(0), 0.0, 1e-12);
}

TEST(DantzigLp, ScaledIdentityZeroBoundIsLeastSquares) {
  const Index n = 4;
  const Matrix x = 2.0 * Matrix::Identity(n, n);  // sqrt(n) I
  const DesignMatrix d = rescale_columns(DesignMatrix(x));
  Vector y(n);
  y << 1.0, -2.0, 0.5, 3.0;
  const LpSolution s = solve_lp(dantzig_lp_reformulation(d, y, Vector::Zero(n)));
  ASSERT_EQ(s.status, LpStatus::optimal);
  const Vector expected = x.transpose() * y / static_cast<double>(n);
  EXPECT_LT((split_to_beta(s.z) - expected).lpNorm<Eigen::Infinity>(), 1e-10);
}

TEST(DantzigLp, MatchesHandAssembledLp) {
  const Index n = 8, p = 4;
  const Matrix x = oracle::gaussian_scaled(n, p, 11);
  const Vector y = oracle::gaussian_vector(n, 12);
  const Vector b = Vector::Constant(p, 0.5);
  // Independent assembly: z = (u, v), rows G(u - v) within corr -+ b.
  const Matrix g = x.transpose() * x / static_cast<double>(n);
  const Vector corr = x.transpose() * y / static_cast<double>(n);
  Matrix a(p, 2 * p);
  a << g, -g;
  const LpProblem hand = make_lp(Vector::Ones(2 * p), a, corr - b, corr + b);
  const auto expected = oracle::lp_minimum(hand);
  ASSERT_TRUE(expected.has_value());
  const LpSolution s = solve_lp(dantzig_lp_reformulation(rescale_columns(DesignMatrix(x)), y, b));
  ASSERT_EQ(s.status, LpStatus::optimal);
  EXPECT_NEAR(s.objective_value, *expected, 1e-8);
}

TEST(DantzigLp, CancelSplitKeepsBetaAndComplementarity) {
  Vector z(6);
  z << 1.0, 0.5, 0.0, 0.25, 0.5, 2.0;
  const Vector before = split_to_beta(z);
  cancel_split(z);
  EXPECT_EQ(split_to_beta(z), before);
  for (Index j = 0; j < 3; ++j) EXPECT_EQ(std::min(z(j), z(j + 3)), 0.0);
  EXPECT_THROW(dantzig_lp_reformulation(DesignMatrix(Matrix::Ones(3, 2)), Vector::Ones(2), Vector::Ones(2)), Error);
}
