#include "cds/baselines.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace cds;

namespace {

RegressionProblem random_problem(Index n, Index p, std::uint64_t seed) {
  const Matrix x = oracle::gaussian_scaled(n, p, seed);
  Vector beta = Vector::Zero(p);
  beta(0) = 1.0;
  beta(3) = -0.7;
  return RegressionProblem(rescale_columns(DesignMatrix(x)), x * beta + 0.5 * oracle::gaussian_vector(n, seed + 7));
}

PenaltyConfig grid_config(std::vector<double> grid) {
  PenaltyConfig c;
  c.lambda_grid = std::move(grid);
  return c;
}

double soft(double z, double t) { return z > t ? z - t : (z < -t ? z + t : 0.0); }

}  // namespace

TEST(Lasso, ZeroAboveLambdaMax) {
  const RegressionProblem pr = random_problem(20, 10, 1);
  const SolutionPath path = lasso_path(pr, grid_config({pr.lambda_max() * 1.01, pr.lambda_max()}));
  for (const auto& e : path.entries()) EXPECT_EQ(e.estimate.size(), 0);
}

TEST(Lasso, OrthogonalDesignSoftThresholds) {
  const Index n = 6;
  const Matrix x = std::sqrt(6.0) * Matrix::Identity(n, n);
  Vector y(n);
  y << 3.0, -1.0, 0.2, 0.0, 1.4, -2.5;
  const RegressionProblem pr(rescale_columns(DesignMatrix(x)), y);
  const std::vector<double> grid{0.9, 0.4, 0.1};
  const SolutionPath path = lasso_path(pr, grid_config(grid));
  const Vector z = x.transpose() * y / static_cast<double>(n);
  for (const auto& e : path.entries()) {
    for (Index j = 0; j < n; ++j) EXPECT_NEAR(e.estimate.beta(j), soft(z(j), e.lambda1), 1e-10);
  }
}

TEST(Lasso, MatchesProximalGradientOracle) {
  const RegressionProblem pr = random_problem(20, 10, 2);
  const Matrix& x = pr.design().values();
  const Vector w = Vector::Ones(10);
  for (double frac : {0.5, 0.2, 0.05}) {
    const double lambda = frac * pr.lambda_max();
    const SparseEstimate e = lasso_path(pr, grid_config({lambda})).entries().back().estimate;
    const Vector ref = oracle::lasso_fista(x, pr.response(), lambda, w);
    EXPECT_NEAR(oracle::enet_objective(x, pr.response(), e.beta, lambda, 1.0, w),
                oracle::enet_objective(x, pr.response(), ref, lambda, 1.0, w), 1e-6);
  }
}

TEST(Lasso, KktHoldsAlongDefaultPath) {
  const RegressionProblem pr = random_problem(30, 50, 3);
  const PenaltyConfig c;
  const SolutionPath path = lasso_path(pr, c);
  EXPECT_EQ(path.size(), static_cast<std::size_t>(c.grid_length));
  EXPECT_DOUBLE_EQ(path.entries().front().lambda1, pr.lambda_max());
  for (const auto& e : path.entries()) {
    const Vector corr = pr.correlations(e.estimate.beta);
    for (Index j = 0; j < 50; ++j) {
      if (e.estimate.beta(j) == 0.0) {
        EXPECT_LE(std::abs(corr(j)), e.lambda1 + c.cd_tol);
      } else {
        EXPECT_NEAR(corr(j), e.lambda1 * (e.estimate.beta(j) > 0 ? 1.0 : -1.0), c.cd_tol);
      }
    }
  }
}

TEST(ElasticNet, AlphaOneIsLasso) {
  const RegressionProblem pr = random_problem(25, 15, 4);
  PenaltyConfig c = grid_config({0.3, 0.1, 0.03});
  c.enet_alpha = 1.0;
  const SolutionPath a = elastic_net_path(pr, c);
  const SolutionPath b = lasso_path(pr, c);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_LT((a.entries()[k].estimate.beta - b.entries()[k].estimate.beta).lpNorm<Eigen::Infinity>(), 1e-8);
  }
}

TEST(ElasticNet, ZeroAboveBoundary) {
  const RegressionProblem pr = random_problem(25, 15, 5);
  PenaltyConfig c = grid_config({pr.lambda_max() / 0.5});
  EXPECT_EQ(elastic_net_path(pr, c).entries().front().estimate.size(), 0);
}

TEST(ElasticNet, MatchesAugmentedLasso) {
  const RegressionProblem pr = random_problem(20, 8, 6);
  const Index n = 20, p = 8;
  const double alpha = 0.5;
  const double lambda = 0.1;
  PenaltyConfig c = grid_config({lambda});
  c.enet_alpha = alpha;
  const SparseEstimate e = elastic_net_path(pr, c).entries().back().estimate;
  // (2n)^{-1}||y - Xb||^2 + lambda(1-alpha)/2 ||b||^2 = (2n)^{-1}||(y,0) - (X; sqrt(n lambda (1-alpha)) I) b||^2.
  Matrix xa(n + p, p);
  xa << pr.design().values(), std::sqrt(n * lambda * (1 - alpha)) * Matrix::Identity(p, p);
  Vector ya = Vector::Zero(n + p);
  ya.head(n) = pr.response();
  // The oracle divides by the augmented row count, so rescale lambda to match.
  const double m = static_cast<double>(n + p);
  const Vector ref = oracle::lasso_fista(xa * std::sqrt(m / n), ya * std::sqrt(m / n), lambda * alpha, Vector::Ones(p));
  EXPECT_LT((e.beta - ref).lpNorm<Eigen::Infinity>(), 1e-6);
}

TEST(AdaptiveLasso, HugeInitialEntersFirst) {
  const RegressionProblem pr = random_problem(30, 12, 7);
  Vector init = Vector::Constant(12, 0.1);
  init(5) = 1e6;
  const AdaptiveLassoPath a = adaptive_lasso_path(pr, PenaltyConfig{}, init);
  const auto& entries = a.path.entries();
  std::size_t k = 0;
  while (k < entries.size() && entries[k].estimate.size() == 0) ++k;
  ASSERT_LT(k, entries.size());
  EXPECT_EQ(entries[k].estimate.support, IndexSet{5});
  EXPECT_NEAR(a.weights(5), 1.0 / (1e6 + 1e-6), 1e-18);
}

TEST(AdaptiveLasso, UniformInitialIsRescaledLasso) {
  const RegressionProblem pr = random_problem(30, 12, 8);
  const double mag = 0.4;
  const double w = 1.0 / (mag + 1e-6);
  const std::vector<double> grid{0.5, 0.2, 0.08};
  const AdaptiveLassoPath a = adaptive_lasso_path(pr, grid_config(grid), Vector::Constant(12, mag));
  std::vector<double> scaled;
  for (double g : grid) scaled.push_back(g * w);
  const SolutionPath l = lasso_path(pr, grid_config(scaled));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_LT((a.path.entries()[k].estimate.beta - l.entries()[k].estimate.beta).lpNorm<Eigen::Infinity>(), 1e-7);
  }
}

TEST(AdaptiveLasso, ZeroInitialIsExcluded) {
  const RegressionProblem pr = random_problem(30, 12, 9);
  Vector init = Vector::Constant(12, 0.5);
  init(0) = 0.0;  // column 0 carries the strongest signal
  const AdaptiveLassoPath a = adaptive_lasso_path(pr, PenaltyConfig{}, init);
  EXPECT_NEAR(a.weights(0), 1e6, 1e-3);
  for (const auto& e : a.path.entries()) EXPECT_EQ(e.estimate.beta(0), 0.0);
}

TEST(AdaptiveLasso, CrossValidatedInitialIsDeterministic) {
  const RegressionProblem pr = random_problem(40, 20, 10);
  const AdaptiveLassoPath a = adaptive_lasso_path(pr, PenaltyConfig{}, 5, 42);
  const AdaptiveLassoPath b = adaptive_lasso_path(pr, PenaltyConfig{}, 5, 42);
  EXPECT_EQ(a.initial, b.initial);
  EXPECT_GT(a.initial.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Oracle, NoiselessRecoversTruth) {
  const Matrix x = oracle::gaussian_scaled(30, 20, 11);
  Vector beta = Vector::Zero(20);
  beta(2) = 0.8;
  beta(7) = -1.3;
  const RegressionProblem pr(rescale_columns(DesignMatrix(x)), x * beta, TrueModel(beta, 0.0));
  EXPECT_LT((oracle_fit(pr).beta - beta).lpNorm<Eigen::Infinity>(), 1e-8);
  const RegressionProblem no_truth(rescale_columns(DesignMatrix(x)), x * beta);
  EXPECT_THROW(oracle_fit(no_truth), Error);
}

TEST(Oracle, SingularRestrictedGramIsAnError) {
  Matrix x = oracle::gaussian_scaled(10, 4, 12);
  x.col(1) = x.col(0);
  Vector beta = Vector::Zero(4);
  beta(0) = 1.0;
  beta(1) = 1.0;
  const RegressionProblem pr(rescale_columns(DesignMatrix(x)), x * beta, TrueModel(beta, 0.0));
  try {
    oracle_fit(pr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::degenerate_input);
  }
}

TEST(PenaltyConfigValidation, RejectsBadFields) {
  PenaltyConfig c;
  c.enet_alpha = 0.0;
  EXPECT_THROW(c.validate(), Error);
  c = PenaltyConfig{};
  c.lambda_grid = {0.1, 0.2};
  EXPECT_THROW(c.validate(), Error);
}
