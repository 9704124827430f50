#pragma once

#include "cds/core_types.hpp"

#include <cstdint>
#include <vector>

namespace cds {

struct PenaltyConfig {
  /// Strictly decreasing positive grid; empty means a log grid from the
  /// zero-solution boundary down to grid_floor_ratio times it.
  std::vector<double> lambda_grid;
  double enet_alpha = 0.5;
  double adaptive_gamma = 1.0;
  double weight_eps = 1e-6;
  double cd_tol = 1e-8;
  int cd_max_iters = 100000;
  int grid_length = 50;
  double grid_floor_ratio = 0.05;

  void validate() const;
};

/// Minimizer of (2n)^{-1} ||y - X beta||^2 + lambda sum_j w_j (alpha |beta_j| + (1 - alpha)/2 beta_j^2)
/// by cyclic coordinate descent, warm-started from `init`. The result
/// carries the KKT residual in feasibility_residual and converged = false if
/// cd_max_iters sweeps did not reach KKT within cd_tol.
SparseEstimate weighted_elastic_net(const RegressionProblem& problem, double lambda, double alpha,
                                    const Vector& weights, const SparseEstimate& init,
                                    double cd_tol, int cd_max_iters);

/// Largest KKT violation of the weighted elastic-net problem at beta.
double elastic_net_kkt_residual(const RegressionProblem& problem, const Vector& beta, double lambda,
                                double alpha, const Vector& weights);

/// Smallest lambda with the zero solution: max_j |n^{-1} x_j^T y| / (alpha w_j).
double penalty_lambda_max(const RegressionProblem& problem, double alpha, const Vector& weights);

SolutionPath lasso_path(const RegressionProblem& problem, const PenaltyConfig& config);

SolutionPath elastic_net_path(const RegressionProblem& problem, const PenaltyConfig& config);

struct AdaptiveLassoPath {
  SolutionPath path;
  Vector initial;
  /// w_j = (|initial_j| + weight_eps)^{-adaptive_gamma}
  Vector weights;
};

AdaptiveLassoPath adaptive_lasso_path(const RegressionProblem& problem, const PenaltyConfig& config,
                                      const Vector& initial);

/// Initial estimate from the cross-validated Lasso.
AdaptiveLassoPath adaptive_lasso_path(const RegressionProblem& problem, const PenaltyConfig& config,
                                      int folds, std::uint64_t seed);

/// Least squares on the true support, zeros elsewhere.
SparseEstimate oracle_fit(const RegressionProblem& problem);

}  // namespace cds
