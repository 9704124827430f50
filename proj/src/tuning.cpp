#include "cds/tuning.hpp"

#include "cds/random.hpp"
#include "cds/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cds {

std::vector<double> log_grid(double high, double low, int length) {
  if (length < 2) throw Error(ErrorCode::invalid_argument, "grid length must be at least 2");
  if (!(high > low && low > 0.0)) throw Error(ErrorCode::invalid_argument, "grid endpoints must satisfy high > low > 0");
  std::vector<double> grid(static_cast<std::size_t>(length));
  const double log_ratio = std::log(low / high);
  for (int k = 0; k < length; ++k) {
    grid[static_cast<std::size_t>(k)] = high * std::exp(log_ratio * k / (length - 1));
  }
  grid.front() = high;
  grid.back() = low;
  return grid;
}

std::vector<double> lambda1_grid(const RegressionProblem& problem, int length, double floor_ratio) {
  if (length < 2) throw Error(ErrorCode::invalid_argument, "grid length must be at least 2");
  if (!(floor_ratio > 0.0 && floor_ratio < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "floor_ratio must lie in (0, 1)");
  }
  const double lmax = problem.lambda_max();
  if (!(lmax > 0.0)) throw Error(ErrorCode::degenerate_input, "zero response: lambda_max is 0");
  return log_grid(lmax, floor_ratio * lmax, length);
}

std::vector<int> make_folds(Index n, int folds, std::uint64_t seed) {
  if (folds < 2 || n < folds) throw Error(ErrorCode::invalid_argument, "need 2 <= folds <= n");
  Rng rng(seed);
  const auto perm = rng.permutation(static_cast<std::size_t>(n));
  std::vector<int> fold(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < perm.size(); ++i) {
    fold[perm[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
  }
  return fold;
}

FoldSplit make_fold_split(const RegressionProblem& problem, const std::vector<int>& fold_of_row,
                          int fold) {
  std::vector<Index> train_rows;
  std::vector<Index> valid_rows;
  for (Index i = 0; i < problem.n(); ++i) {
    (fold_of_row[static_cast<std::size_t>(i)] == fold ? valid_rows : train_rows).push_back(i);
  }
  if (train_rows.empty() || valid_rows.empty()) {
    throw Error(ErrorCode::invalid_argument, "fold leaves an empty training or validation part");
  }
  const DesignMatrix train_raw = problem.design().select_rows(train_rows);
  const DesignMatrix train_design = rescale_columns(train_raw);
  Vector train_y(static_cast<Index>(train_rows.size()));
  for (std::size_t r = 0; r < train_rows.size(); ++r) {
    train_y(static_cast<Index>(r)) = problem.response()(train_rows[r]);
  }
  // Column factors introduced by the training rescale.
  const Vector factors = train_design.scales().cwiseQuotient(train_raw.scales());
  Matrix vx(static_cast<Index>(valid_rows.size()), problem.p());
  Vector vy(static_cast<Index>(valid_rows.size()));
  for (std::size_t r = 0; r < valid_rows.size(); ++r) {
    vx.row(static_cast<Index>(r)) =
        problem.design().values().row(valid_rows[r]).cwiseProduct(factors.transpose());
    vy(static_cast<Index>(r)) = problem.response()(valid_rows[r]);
  }
  return FoldSplit{RegressionProblem(train_design, std::move(train_y)), std::move(vx), std::move(vy)};
}

CvResult cross_validate(const RegressionProblem& problem, const std::vector<double>& grid,
                        const PathFitter& fitter, int folds, std::uint64_t seed) {
  if (grid.empty()) throw Error(ErrorCode::invalid_argument, "empty tuning grid");
  CvResult result;
  result.fold_assignment = make_folds(problem.n(), folds, seed);
  const std::size_t g = grid.size();
  std::vector<std::vector<double>> mse(g, std::vector<double>(static_cast<std::size_t>(folds)));
  std::vector<int> inherited(g, 0);
  int stopped_at_head = 0;

  for (int f = 0; f < folds; ++f) {
    const FoldSplit split = make_fold_split(problem, result.fold_assignment, f);
    const SolutionPath path = fitter(split.train, grid);
    if (path.empty()) throw Error(ErrorCode::numerical_failure, "fold path is empty");
    if (path.size() == 1 && (path.stopped_early() || !path.skipped().empty())) ++stopped_at_head;
    const double last_lambda = path.entries().back().lambda1;
    const auto& skipped = path.skipped();
    for (std::size_t k = 0; k < g; ++k) {
      const SparseEstimate& est = path.estimate_at(grid[k]);
      const bool was_skipped = std::find(skipped.begin(), skipped.end(), grid[k]) != skipped.end();
      if ((path.stopped_early() && grid[k] < last_lambda) || was_skipped) ++inherited[k];
      const Vector resid = split.validation_y - split.validation_x * est.beta;
      mse[k][static_cast<std::size_t>(f)] = resid.squaredNorm() / static_cast<double>(resid.size());
    }
  }

  std::size_t best = 0;
  for (std::size_t k = 0; k < g; ++k) {
    CvPoint pt;
    pt.lambda1 = grid[k];
    double sum = 0.0;
    for (double v : mse[k]) sum += v;
    pt.mean_mse = sum / folds;
    double ss = 0.0;
    for (double v : mse[k]) ss += (v - pt.mean_mse) * (v - pt.mean_mse);
    pt.se = std::sqrt(ss / (folds - 1)) / std::sqrt(static_cast<double>(folds));
    pt.inherited_folds = inherited[k];
    result.cv_errors.push_back(pt);
    if (pt.mean_mse < result.cv_errors[best].mean_mse) best = k;
  }
  result.chosen_lambda1 = grid[best];
  if (stopped_at_head == folds) {
    result.status = CvStatus::all_folds_stopped_at_head;
    result.chosen_lambda1 = grid.front();
  }
  return result;
}

CvResult cross_validate_lambda1(const RegressionProblem& problem, const CdsConfig& config,
                                int folds, std::uint64_t seed) {
  config.validate();
  const std::vector<double> grid = resolve_lambda1_grid(problem, config);
  PathFitter fitter = [&config](const RegressionProblem& train, const std::vector<double>& g) {
    CdsConfig fold_config = config;
    fold_config.lambda1_grid.clear();
    for (double v : g) {
      if (v >= config.lambda0) fold_config.lambda1_grid.push_back(v);
    }
    return cds_path(train, fold_config);
  };
  CvResult result = cross_validate(problem, grid, fitter, folds, seed);
  if (result.status == CvStatus::all_folds_stopped_at_head) return result;
  // The full-data path skips some grid values; choose among the ones it holds.
  const SolutionPath path = cds_path(problem, config);
  std::vector<double> held;
  for (const auto& e : path.entries()) held.push_back(e.lambda1);
  const CvPoint* best = nullptr;
  for (const CvPoint& pt : result.cv_errors) {
    if (std::find(held.begin(), held.end(), pt.lambda1) == held.end()) continue;
    if (!best || pt.mean_mse < best->mean_mse) best = &pt;
  }
  if (best) result.chosen_lambda1 = best->lambda1;
  return result;
}

}  // namespace cds
