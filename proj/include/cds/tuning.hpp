#pragma once

#include "cds/core_types.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace cds {

/// Log-spaced decreasing grid from lambda_max = ||n^{-1} X^T y||_inf down to
/// floor_ratio * lambda_max (both endpoints included).
std::vector<double> lambda1_grid(const RegressionProblem& problem, int length, double floor_ratio);

/// Log-spaced decreasing grid between explicit endpoints.
std::vector<double> log_grid(double high, double low, int length);

struct CvPoint {
  double lambda1 = 0.0;
  double mean_mse = 0.0;
  double se = 0.0;
  /// Folds whose path stopped before this grid value and reused their last estimate.
  int inherited_folds = 0;
};

enum class CvStatus { ok, all_folds_stopped_at_head };

struct CvResult {
  double chosen_lambda1 = 0.0;
  std::vector<CvPoint> cv_errors;
  /// Fold index of every row of the problem.
  std::vector<int> fold_assignment;
  CvStatus status = CvStatus::ok;
};

/// Fits a path on a training problem over (at least) the given grid values.
using PathFitter =
    std::function<SolutionPath(const RegressionProblem& train, const std::vector<double>& grid)>;

/// Seeded balanced fold labels for n rows.
std::vector<int> make_folds(Index n, int folds, std::uint64_t seed);

/// Training / validation split for one fold. Training columns are rescaled on
/// the training rows only; validation rows get the same column factors.
struct FoldSplit {
  RegressionProblem train;
  Matrix validation_x;
  Vector validation_y;
};

FoldSplit make_fold_split(const RegressionProblem& problem, const std::vector<int>& fold_of_row,
                          int fold);

/// K-fold CV of a path fitter over `grid`. Picks the minimum mean validation
/// MSE; ties go to the larger grid value.
CvResult cross_validate(const RegressionProblem& problem, const std::vector<double>& grid,
                        const PathFitter& fitter, int folds, std::uint64_t seed);

/// CV of the constrained Dantzig path over lambda1 with config's lambda0 and lambda.
/// The choice is restricted to grid values held by the full-data path.
CvResult cross_validate_lambda1(const RegressionProblem& problem, const CdsConfig& config,
                                int folds, std::uint64_t seed);

}  // namespace cds
