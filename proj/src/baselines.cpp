#include "cds/baselines.hpp"

#include "cds/tuning.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <string>

namespace cds {

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

std::vector<double> resolve_grid(const PenaltyConfig& config, double lmax) {
  if (!config.lambda_grid.empty()) return config.lambda_grid;
  if (!(lmax > 0.0)) throw Error(ErrorCode::degenerate_input, "zero response: lambda_max is 0");
  return log_grid(lmax, config.grid_floor_ratio * lmax, config.grid_length);
}

SolutionPath weighted_path(const RegressionProblem& problem, const PenaltyConfig& config,
                           double alpha, const Vector& weights) {
  config.validate();
  if (!problem.design().column_scaled()) {
    throw Error(ErrorCode::invalid_argument, "penalized paths need a column-scaled design");
  }
  const std::vector<double> grid = resolve_grid(config, penalty_lambda_max(problem, alpha, weights));
  SolutionPath path;
  SparseEstimate current = SparseEstimate::zeros(problem.p());
  for (double lambda : grid) {
    current = weighted_elastic_net(problem, lambda, alpha, weights, current, config.cd_tol,
                                   config.cd_max_iters);
    path.append(lambda, current);
  }
  path.stop(StopReason::grid_exhausted);
  return path;
}

}  // namespace

void PenaltyConfig::validate() const {
  for (std::size_t k = 0; k < lambda_grid.size(); ++k) {
    if (!(lambda_grid[k] > 0.0) || !std::isfinite(lambda_grid[k])) {
      throw Error(ErrorCode::config_error, "lambda_grid entries must be positive and finite");
    }
    if (k > 0 && !(lambda_grid[k] < lambda_grid[k - 1])) {
      throw Error(ErrorCode::config_error, "lambda_grid must be strictly decreasing");
    }
  }
  if (!(enet_alpha > 0.0 && enet_alpha <= 1.0)) throw Error(ErrorCode::config_error, "enet_alpha must lie in (0, 1]");
  if (!(adaptive_gamma > 0.0)) throw Error(ErrorCode::config_error, "adaptive_gamma must be positive");
  if (!(weight_eps > 0.0)) throw Error(ErrorCode::config_error, "weight_eps must be positive");
  if (!(cd_tol > 0.0)) throw Error(ErrorCode::config_error, "cd_tol must be positive");
  if (cd_max_iters < 1) throw Error(ErrorCode::config_error, "cd_max_iters must be at least 1");
  if (lambda_grid.empty()) {
    if (grid_length < 2) throw Error(ErrorCode::config_error, "grid_length must be at least 2");
    if (!(grid_floor_ratio > 0.0 && grid_floor_ratio < 1.0)) {
      throw Error(ErrorCode::config_error, "grid_floor_ratio must lie in (0, 1)");
    }
  }
}

double elastic_net_kkt_residual(const RegressionProblem& problem, const Vector& beta, double lambda,
                                double alpha, const Vector& weights) {
  const Vector c = problem.correlations(beta);
  double worst = 0.0;
  for (Index j = 0; j < beta.size(); ++j) {
    const double l1 = lambda * weights(j) * alpha;
    const double l2 = lambda * weights(j) * (1.0 - alpha);
    double v;
    if (beta(j) == 0.0) {
      v = std::max(0.0, std::abs(c(j)) - l1);
    } else {
      v = std::abs(c(j) - l1 * (beta(j) > 0.0 ? 1.0 : -1.0) - l2 * beta(j));
    }
    worst = std::max(worst, v);
  }
  return worst;
}

double penalty_lambda_max(const RegressionProblem& problem, double alpha, const Vector& weights) {
  if (weights.size() != problem.p()) throw Error(ErrorCode::dimension_mismatch, "weights length differs from p");
  const Vector c = problem.correlations(Vector::Zero(problem.p()));
  double m = 0.0;
  for (Index j = 0; j < c.size(); ++j) m = std::max(m, std::abs(c(j)) / (alpha * weights(j)));
  return m;
}

SparseEstimate weighted_elastic_net(const RegressionProblem& problem, double lambda, double alpha,
                                    const Vector& weights, const SparseEstimate& init,
                                    double cd_tol, int cd_max_iters) {
  const Index n = problem.n();
  const Index p = problem.p();
  if (weights.size() != p || init.beta.size() != p) {
    throw Error(ErrorCode::dimension_mismatch, "weights or initial estimate length differs from p");
  }
  const Matrix& x = problem.design().values();
  const double inv_n = 1.0 / static_cast<double>(n);
  Vector col_sq(p);
  for (Index j = 0; j < p; ++j) col_sq(j) = x.col(j).squaredNorm() * inv_n;

  Vector beta = init.beta;
  Vector resid = problem.response() - x * beta;
  std::vector<char> in_active(static_cast<std::size_t>(p), 0);
  std::vector<Index> active;
  for (Index j = 0; j < p; ++j) {
    if (beta(j) != 0.0) {
      in_active[static_cast<std::size_t>(j)] = 1;
      active.push_back(j);
    }
  }

  auto update = [&](Index j) {
    const double old = beta(j);
    const double z = x.col(j).dot(resid) * inv_n + col_sq(j) * old;
    const double next = soft_threshold(z, lambda * weights(j) * alpha) /
                        (col_sq(j) + lambda * weights(j) * (1.0 - alpha));
    if (next != old) {
      resid.noalias() -= (next - old) * x.col(j);
      beta(j) = next;
    }
    return std::abs(next - old) * std::sqrt(col_sq(j));
  };

  int sweeps = 0;
  bool converged = false;
  double kkt = 0.0;
  while (sweeps < cd_max_iters) {
    // Inner sweeps on the active set until coefficients settle.
    while (sweeps < cd_max_iters) {
      ++sweeps;
      double change = 0.0;
      for (Index j : active) change = std::max(change, update(j));
      if (change <= 0.1 * cd_tol) break;
    }
    // Full sweep: admit violators, then certify.
    ++sweeps;
    bool added = false;
    for (Index j = 0; j < p; ++j) {
      if (in_active[static_cast<std::size_t>(j)]) continue;
      const double c = x.col(j).dot(resid) * inv_n;
      if (std::abs(c) > lambda * weights(j) * alpha) {
        update(j);
        in_active[static_cast<std::size_t>(j)] = 1;
        active.push_back(j);
        added = true;
      }
    }
    if (added) {
      std::sort(active.begin(), active.end());
      continue;
    }
    resid = problem.response() - x * beta;
    kkt = elastic_net_kkt_residual(problem, beta, lambda, alpha, weights);
    if (kkt <= cd_tol) {
      converged = true;
      break;
    }
  }
  if (!converged) kkt = elastic_net_kkt_residual(problem, beta, lambda, alpha, weights);

  SparseEstimate est = SparseEstimate::from_beta(std::move(beta));
  est.iterations = sweeps;
  est.converged = converged;
  est.feasibility_residual = kkt;
  return est;
}

SolutionPath lasso_path(const RegressionProblem& problem, const PenaltyConfig& config) {
  return weighted_path(problem, config, 1.0, Vector::Ones(problem.p()));
}

SolutionPath elastic_net_path(const RegressionProblem& problem, const PenaltyConfig& config) {
  return weighted_path(problem, config, config.enet_alpha, Vector::Ones(problem.p()));
}

AdaptiveLassoPath adaptive_lasso_path(const RegressionProblem& problem, const PenaltyConfig& config,
                                      const Vector& initial) {
  config.validate();
  if (initial.size() != problem.p()) throw Error(ErrorCode::dimension_mismatch, "initial estimate length differs from p");
  AdaptiveLassoPath out;
  out.initial = initial;
  out.weights.resize(problem.p());
  for (Index j = 0; j < problem.p(); ++j) {
    out.weights(j) = std::pow(std::abs(initial(j)) + config.weight_eps, -config.adaptive_gamma);
  }
  out.path = weighted_path(problem, config, 1.0, out.weights);
  return out;
}

AdaptiveLassoPath adaptive_lasso_path(const RegressionProblem& problem, const PenaltyConfig& config,
                                      int folds, std::uint64_t seed) {
  config.validate();
  const std::vector<double> grid = resolve_grid(config, problem.lambda_max());
  PathFitter fitter = [&config](const RegressionProblem& train, const std::vector<double>& g) {
    PenaltyConfig c = config;
    c.lambda_grid = g;
    return lasso_path(train, c);
  };
  const CvResult cv = cross_validate(problem, grid, fitter, folds, seed);
  PenaltyConfig full = config;
  full.lambda_grid = grid;
  const SolutionPath init_path = lasso_path(problem, full);
  return adaptive_lasso_path(problem, config, init_path.estimate_at(cv.chosen_lambda1).beta);
}

SparseEstimate oracle_fit(const RegressionProblem& problem) {
  if (!problem.truth()) throw Error(ErrorCode::invalid_argument, "oracle fit needs the true model");
  const IndexSet& support = problem.truth()->support;
  Vector beta = Vector::Zero(problem.p());
  if (!support.empty()) {
    const Matrix xs = problem.design().select_columns(support).values();
    Eigen::ColPivHouseholderQR<Matrix> qr(xs);
    if (qr.rank() < static_cast<Index>(support.size())) {
      throw Error(ErrorCode::degenerate_input,
                  "restricted Gram on the true support is singular (rank " + std::to_string(qr.rank()) +
                      " < " + std::to_string(support.size()) + ")");
    }
    const Vector coef = qr.solve(problem.response());
    for (std::size_t k = 0; k < support.size(); ++k) beta(support[k]) = coef(static_cast<Index>(k));
  }
  SparseEstimate est = SparseEstimate::from_beta(std::move(beta));
  est.converged = true;
  return est;
}

}  // namespace cds
