#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cds {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Sorted, duplicate-free list of column indices.
using IndexSet = std::vector<Index>;

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  degenerate_input,
  numerical_failure,
  budget_exceeded,
  parse_error,
  config_error,
};

/// Structured error carried by every failing operation in the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Dense n x p design. Scale metadata maps raw covariates into the stored
/// coordinate system: stored(i, j) = (raw(i, j) - centers[j]) * scales[j].
class DesignMatrix {
 public:
  explicit DesignMatrix(Matrix values);
  DesignMatrix(Matrix values, Vector centers, Vector scales, bool column_scaled);

  Index n() const noexcept { return values_.rows(); }
  Index p() const noexcept { return values_.cols(); }
  const Matrix& values() const noexcept { return values_; }
  bool column_scaled() const noexcept { return column_scaled_; }
  const Vector& centers() const noexcept { return centers_; }
  const Vector& scales() const noexcept { return scales_; }

  double operator()(Index i, Index j) const { return values_(i, j); }
  auto col(Index j) const { return values_.col(j); }

  /// Applies this design's centering and scaling to raw rows with p columns.
  Matrix transform_raw(const Matrix& raw) const;

  /// Sub-design with the given rows. The result keeps the scale metadata but
  /// is no longer flagged as column-scaled.
  DesignMatrix select_rows(const std::vector<Index>& rows) const;

  /// Sub-design with the given columns (scale metadata restricted accordingly).
  DesignMatrix select_columns(const IndexSet& cols) const;

 private:
  Matrix values_;
  Vector centers_;
  Vector scales_;
  bool column_scaled_ = false;
};

/// Rescales every column to L2 norm sqrt(n). With center = true the columns
/// are first shifted to zero mean. Throws on a zero-norm column.
DesignMatrix rescale_columns(const DesignMatrix& x, bool center = false);

struct Standardized {
  Vector values;
  double mean = 0.0;
  double sd = 0.0;
};

/// Zero mean, unit population variance (divide by n).
Standardized standardize_response(const Vector& y);

struct TrueModel {
  Vector beta0;
  IndexSet support;
  Index s = 0;
  double sigma = 0.0;

  TrueModel() = default;
  TrueModel(Vector beta, double noise_sd);
};

class RegressionProblem {
 public:
  RegressionProblem(DesignMatrix design, Vector response,
                    std::optional<TrueModel> truth = std::nullopt);

  const DesignMatrix& design() const noexcept { return design_; }
  const Vector& response() const noexcept { return response_; }
  const std::optional<TrueModel>& truth() const noexcept { return truth_; }
  Index n() const noexcept { return design_.n(); }
  Index p() const noexcept { return design_.p(); }

  /// n^{-1} X^T (y - X beta) for every column.
  Vector correlations(const Vector& beta) const;

  /// ||n^{-1} X^T y||_inf.
  double lambda_max() const;

 private:
  DesignMatrix design_;
  Vector response_;
  std::optional<TrueModel> truth_;
};

struct CdsConfig {
  double lambda0 = 0.01;
  double lambda = 0.2;
  /// Explicit lambda1 grid. When empty, paths build a log-spaced grid of
  /// grid_length points from lambda_max down to grid_floor_ratio * lambda_max.
  std::vector<double> lambda1_grid;
  int grid_length = 50;
  double grid_floor_ratio = 0.05;
  int cv_folds = 5;
  int max_active_iters = 100;
  double feas_tol = 1e-8;
  double lp_tol = 1e-9;

  /// Throws Error(config_error) when an invariant fails.
  void validate() const;

  /// Defaults lambda = sqrt(log p / n) and lambda0 = 0.05 * lambda.
  static CdsConfig heuristic(Index n, Index p);
};

struct SparseEstimate {
  Vector beta;
  IndexSet support;
  int iterations = 0;
  bool converged = true;
  double feasibility_residual = 0.0;
  double l1_norm = 0.0;

  /// Snaps |beta_j| < zero_tol to exact 0 and fills support and l1_norm.
  static SparseEstimate from_beta(Vector beta, double zero_tol = 0.0);
  static SparseEstimate zeros(Index p);

  Index size() const noexcept { return static_cast<Index>(support.size()); }
};

enum class StopReason { grid_exhausted, left_b_lambda, iteration_cap };

const char* to_string(StopReason reason);

struct PathEntry {
  double lambda1 = 0.0;
  SparseEstimate estimate;
};

class SolutionPath {
 public:
  /// Throws unless lambda1 is strictly below the last recorded value.
  void append(double lambda1, SparseEstimate estimate);
  void stop(StopReason reason);
  /// Records a grid value whose fit did not converge (no entry is stored).
  void skip(double lambda1) { skipped_.push_back(lambda1); }

  const std::vector<PathEntry>& entries() const noexcept { return entries_; }
  bool stopped_early() const noexcept { return stopped_early_; }
  StopReason stop_reason() const noexcept { return stop_reason_; }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }

  const std::vector<double>& skipped() const noexcept { return skipped_; }

  /// Estimate in effect at `lambda1`: the entry with the smallest lambda1 that
  /// is still >= the value, or the first entry when the value lies above the
  /// whole path.
  const SparseEstimate& estimate_at(double lambda1) const;

 private:
  std::vector<PathEntry> entries_;
  std::vector<double> skipped_;
  bool stopped_early_ = false;
  StopReason stop_reason_ = StopReason::grid_exhausted;
};

/// Indices j with beta[j] != 0.
IndexSet support_of(const Vector& beta);

}  // namespace cds
