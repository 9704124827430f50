#include "cds/core_types.hpp"

#include <cmath>
#include <sstream>

namespace cds {

namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::invalid_argument, std::string(what) + " contains non-finite entries");
  }
}

}  // namespace

DesignMatrix::DesignMatrix(Matrix values)
    : DesignMatrix(std::move(values), Vector(), Vector(), false) {}

DesignMatrix::DesignMatrix(Matrix values, Vector centers, Vector scales, bool column_scaled)
    : values_(std::move(values)),
      centers_(std::move(centers)),
      scales_(std::move(scales)),
      column_scaled_(column_scaled) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw Error(ErrorCode::invalid_argument, "design matrix must have n >= 1 and p >= 1");
  }
  require_finite(values_, "design matrix");
  if (centers_.size() == 0) centers_ = Vector::Zero(p());
  if (scales_.size() == 0) scales_ = Vector::Ones(p());
  if (centers_.size() != p() || scales_.size() != p()) {
    throw Error(ErrorCode::dimension_mismatch, "scale metadata length differs from p");
  }
  if (column_scaled_) {
    const double target = std::sqrt(static_cast<double>(n()));
    for (Index j = 0; j < p(); ++j) {
      if (std::abs(values_.col(j).norm() - target) > 1e-8 * target) {
        std::ostringstream os;
        os << "column " << j << " flagged as scaled but has norm " << values_.col(j).norm();
        throw Error(ErrorCode::invalid_argument, os.str());
      }
    }
  }
}

Matrix DesignMatrix::transform_raw(const Matrix& raw) const {
  if (raw.cols() != p()) {
    throw Error(ErrorCode::dimension_mismatch, "raw rows have the wrong number of columns");
  }
  return (raw.rowwise() - centers_.transpose()) * scales_.asDiagonal();
}

DesignMatrix DesignMatrix::select_rows(const std::vector<Index>& rows) const {
  Matrix sub(static_cast<Index>(rows.size()), p());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] < 0 || rows[r] >= n()) {
      throw Error(ErrorCode::invalid_argument, "row index out of range");
    }
    sub.row(static_cast<Index>(r)) = values_.row(rows[r]);
  }
  return DesignMatrix(std::move(sub), centers_, scales_, false);
}

DesignMatrix DesignMatrix::select_columns(const IndexSet& cols) const {
  Matrix sub(n(), static_cast<Index>(cols.size()));
  Vector c(static_cast<Index>(cols.size()));
  Vector s(static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const auto j = cols[k];
    if (j < 0 || j >= p()) throw Error(ErrorCode::invalid_argument, "column index out of range");
    sub.col(static_cast<Index>(k)) = values_.col(j);
    c(static_cast<Index>(k)) = centers_(j);
    s(static_cast<Index>(k)) = scales_(j);
  }
  return DesignMatrix(std::move(sub), std::move(c), std::move(s), column_scaled_);
}

DesignMatrix rescale_columns(const DesignMatrix& x, bool center) {
  Matrix values = x.values();
  Vector centers = x.centers();
  Vector scales = x.scales();
  const double target = std::sqrt(static_cast<double>(x.n()));
  for (Index j = 0; j < x.p(); ++j) {
    if (center) {
      const double mu = values.col(j).mean();
      values.col(j).array() -= mu;
      // stored = (raw - c) * s, so shifting stored by mu shifts raw by mu / s
      centers(j) += mu / scales(j);
    }
    const double norm = values.col(j).norm();
    if (!(norm > 0.0)) {
      throw Error(ErrorCode::degenerate_input,
                  "column " + std::to_string(j) + " has zero norm and cannot be rescaled");
    }
    const double factor = target / norm;
    values.col(j) *= factor;
    scales(j) *= factor;
  }
  return DesignMatrix(std::move(values), std::move(centers), std::move(scales), true);
}

Standardized standardize_response(const Vector& y) {
  if (y.size() < 2) throw Error(ErrorCode::invalid_argument, "response needs at least 2 entries");
  if (!y.allFinite()) throw Error(ErrorCode::invalid_argument, "response contains non-finite entries");
  Standardized out;
  out.mean = y.mean();
  const Vector centered = y.array() - out.mean;
  out.sd = std::sqrt(centered.squaredNorm() / static_cast<double>(y.size()));
  if (!(out.sd > 0.0)) throw Error(ErrorCode::degenerate_input, "response is constant");
  out.values = centered / out.sd;
  return out;
}

TrueModel::TrueModel(Vector beta, double noise_sd) : beta0(std::move(beta)), sigma(noise_sd) {
  if (!(sigma >= 0.0)) throw Error(ErrorCode::invalid_argument, "sigma must be nonnegative");
  support = support_of(beta0);
  s = static_cast<Index>(support.size());
}

RegressionProblem::RegressionProblem(DesignMatrix design, Vector response,
                                     std::optional<TrueModel> truth)
    : design_(std::move(design)), response_(std::move(response)), truth_(std::move(truth)) {
  if (response_.size() != design_.n()) {
    throw Error(ErrorCode::dimension_mismatch, "response length differs from n");
  }
  if (!response_.allFinite()) {
    throw Error(ErrorCode::invalid_argument, "response contains non-finite entries");
  }
  if (truth_) {
    if (truth_->beta0.size() != design_.p()) {
      throw Error(ErrorCode::dimension_mismatch, "true coefficient length differs from p");
    }
    if (truth_->s > std::min(design_.n(), design_.p())) {
      throw Error(ErrorCode::invalid_argument, "true support larger than min(n, p)");
    }
  }
}

Vector RegressionProblem::correlations(const Vector& beta) const {
  const Vector residual = response_ - design_.values() * beta;
  return design_.values().transpose() * residual / static_cast<double>(n());
}

double RegressionProblem::lambda_max() const {
  return (design_.values().transpose() * response_).cwiseAbs().maxCoeff() /
         static_cast<double>(n());
}

void CdsConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::config_error, msg); };
  if (!(lambda0 >= 0.0)) fail("lambda0 must be nonnegative");
  if (!(lambda >= 0.0)) fail("lambda must be nonnegative");
  for (std::size_t i = 0; i < lambda1_grid.size(); ++i) {
    if (!(lambda1_grid[i] > 0.0)) fail("lambda1 grid entries must be positive");
    if (i > 0 && !(lambda1_grid[i] < lambda1_grid[i - 1])) {
      fail("lambda1 grid must be strictly decreasing");
    }
    if (lambda0 > lambda1_grid[i]) fail("lambda0 exceeds a lambda1 grid entry");
  }
  if (grid_length < 2) fail("grid_length must be at least 2");
  if (!(grid_floor_ratio > 0.0 && grid_floor_ratio < 1.0)) fail("grid_floor_ratio must lie in (0, 1)");
  if (cv_folds < 2) fail("cv_folds must be at least 2");
  if (max_active_iters < 1) fail("max_active_iters must be at least 1");
  if (!(feas_tol > 0.0)) fail("feas_tol must be positive");
  if (!(lp_tol > 0.0)) fail("lp_tol must be positive");
}

CdsConfig CdsConfig::heuristic(Index n, Index p) {
  CdsConfig c;
  const double scale = std::sqrt(std::log(static_cast<double>(std::max<Index>(p, 2))) /
                                 static_cast<double>(n));
  c.lambda = scale;
  c.lambda0 = 0.05 * scale;
  return c;
}

SparseEstimate SparseEstimate::from_beta(Vector beta, double zero_tol) {
  SparseEstimate e;
  for (Index j = 0; j < beta.size(); ++j) {
    if (std::abs(beta(j)) < zero_tol || beta(j) == 0.0) beta(j) = 0.0;
  }
  e.support = support_of(beta);
  e.l1_norm = beta.lpNorm<1>();
  e.beta = std::move(beta);
  return e;
}

SparseEstimate SparseEstimate::zeros(Index p) { return from_beta(Vector::Zero(p)); }

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::grid_exhausted: return "grid-exhausted";
    case StopReason::left_b_lambda: return "left-B-lambda";
    case StopReason::iteration_cap: return "iteration-cap";
  }
  return "unknown";
}

void SolutionPath::append(double lambda1, SparseEstimate estimate) {
  if (!entries_.empty() && !(lambda1 < entries_.back().lambda1)) {
    throw Error(ErrorCode::invalid_argument, "solution path lambda1 values must strictly decrease");
  }
  entries_.push_back(PathEntry{lambda1, std::move(estimate)});
}

void SolutionPath::stop(StopReason reason) {
  stop_reason_ = reason;
  stopped_early_ = reason != StopReason::grid_exhausted;
}

const SparseEstimate& SolutionPath::estimate_at(double lambda1) const {
  if (entries_.empty()) throw Error(ErrorCode::invalid_argument, "empty solution path");
  const PathEntry* found = &entries_.front();
  for (const auto& e : entries_) {
    if (e.lambda1 < lambda1) break;
    found = &e;
  }
  return found->estimate;
}

IndexSet support_of(const Vector& beta) {
  IndexSet s;
  for (Index j = 0; j < beta.size(); ++j) {
    if (beta(j) != 0.0) s.push_back(j);
  }
  return s;
}

}  // namespace cds
