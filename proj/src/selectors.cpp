#include "cds/selectors.hpp"

#include "cds/dantzig_lp.hpp"
#include "cds/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace cds {

namespace {

IndexSet merge_sets(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Matrix gather_columns(const Matrix& x, const IndexSet& cols) {
  Matrix out(x.rows(), static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Index>(k)) = x.col(cols[k]);
  return out;
}

// Largest `count` entries of `score` among candidates, returned sorted by index.
IndexSet top_scored(std::vector<std::pair<double, Index>> scored, Index count) {
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.first > b.first || (a.first == b.first && a.second < b.second);
  });
  IndexSet out;
  for (std::size_t i = 0; i < scored.size() && static_cast<Index>(i) < count; ++i) {
    out.push_back(scored[i].second);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void require_scaled(const RegressionProblem& problem) {
  if (!problem.design().column_scaled()) {
    throw Error(ErrorCode::invalid_argument, "design columns must be rescaled to norm sqrt(n)");
  }
}

std::string describe(double lambda1, const IndexSet& set) {
  std::ostringstream os;
  os << "lambda1=" << lambda1 << " active={";
  for (std::size_t i = 0; i < set.size(); ++i) os << (i ? "," : "") << set[i];
  os << "}";
  return os.str();
}

}  // namespace

namespace {

struct GeneratedSolve {
  Vector beta;
  int rounds = 0;
};

// Dantzig LP over the columns and rows in `universe` with per-column bounds,
// solved by joint row/column generation. The working set W carries both the
// enforced rows and the free columns; the LP on W is always feasible because
// n^{-1} X_W^T y lies in the range of the Gram block. A round ends when no row
// in the universe is violated and no column has a negative reduced cost,
// which certifies optimality for the whole universe.
GeneratedSolve generated_dantzig(const RegressionProblem& problem, const IndexSet& universe,
                                 const Vector& bounds, const IndexSet& warm,
                                 const DantzigOptions& options, double lambda1_for_message) {
  const Index p = problem.p();
  const Index u = static_cast<Index>(universe.size());
  const double inv_n = 1.0 / static_cast<double>(problem.n());
  const Matrix& x = problem.design().values();

  // Working set as positions into `universe`.
  std::vector<Index> working;
  if (u <= 2 * options.batch) {
    working.resize(static_cast<std::size_t>(u));
    std::iota(working.begin(), working.end(), Index{0});
  } else {
    for (Index j : warm) {
      const auto it = std::lower_bound(universe.begin(), universe.end(), j);
      if (it != universe.end() && *it == j) working.push_back(it - universe.begin());
    }
  }

  GeneratedSolve out;
  out.beta = Vector::Zero(p);
  // Basis of the previous round, keyed by universe position.
  std::vector<Index> prev_working;
  LpBasis prev_basis;
  while (true) {
    ++out.rounds;
    Vector dual_image;  // X_W y_W, length n
    std::vector<char> in_working(static_cast<std::size_t>(u), 0);
    for (Index k : working) in_working[static_cast<std::size_t>(k)] = 1;
    if (!working.empty()) {
      const std::size_t w = working.size();
      IndexSet cols(w);
      Vector wb(static_cast<Index>(w));
      for (std::size_t k = 0; k < w; ++k) {
        cols[k] = universe[static_cast<std::size_t>(working[k])];
        wb(static_cast<Index>(k)) = bounds(working[k]);
      }
      const Matrix xw = gather_columns(x, cols);
      const Matrix gram = xw.transpose() * xw * inv_n;
      const Vector corr = xw.transpose() * problem.response() * inv_n;
      LpOptions opt;
      opt.tol = options.lp_tol;
      // New rows enter with basic activities and new columns at zero, so the
      // previous basis stays nonsingular.
      LpBasis warm;
      if (!prev_working.empty()) {
        const std::size_t pw = prev_working.size();
        warm.variables.assign(2 * w, BasisStatus::at_lower);
        warm.rows.assign(w, BasisStatus::basic);
        std::size_t o = 0;
        for (std::size_t k = 0; k < w; ++k) {
          while (o < pw && prev_working[o] < working[k]) ++o;
          if (o < pw && prev_working[o] == working[k]) {
            warm.variables[k] = prev_basis.variables[o];
            warm.variables[w + k] = prev_basis.variables[pw + o];
            warm.rows[k] = prev_basis.rows[o];
          }
        }
        opt.warm_start = &warm;
      }
      LpSolution sol = solve_lp(dantzig_lp_from_gram(gram, corr, wb), opt);
      if (sol.status != LpStatus::optimal) {
        throw Error(ErrorCode::numerical_failure,
                    std::string("Dantzig LP ended with status ") + to_string(sol.status) + " at " +
                        describe(lambda1_for_message, cols));
      }
      prev_working = working;
      prev_basis = std::move(sol.basis);
      cancel_split(sol.z);
      const Vector local = split_to_beta(sol.z);
      out.beta.setZero();
      for (std::size_t k = 0; k < cols.size(); ++k) out.beta(cols[k]) = local(static_cast<Index>(k));
      dual_image = xw * sol.row_duals;
    }
    const Vector resid = problem.response() - x * out.beta;

    std::vector<std::pair<double, Index>> row_viol;
    std::vector<std::pair<double, Index>> col_viol;
    for (Index k = 0; k < u; ++k) {
      if (in_working[static_cast<std::size_t>(k)]) continue;
      const auto xj = x.col(universe[static_cast<std::size_t>(k)]);
      const double rv = std::abs(xj.dot(resid) * inv_n) - bounds(k);
      if (rv > 0.5 * options.feas_tol) row_viol.emplace_back(rv, k);
      // Reduced cost of a column outside W is 1 -/+ n^{-1} x_j^T X_W y_W.
      if (dual_image.size() > 0) {
        const double cv = std::abs(xj.dot(dual_image) * inv_n) - 1.0;
        if (cv > options.lp_tol) col_viol.emplace_back(cv, k);
      }
    }
    if (row_viol.empty() && col_viol.empty()) break;
    std::vector<Index> add = merge_sets(top_scored(std::move(row_viol), options.batch),
                                        top_scored(std::move(col_viol), options.batch));
    std::sort(working.begin(), working.end());
    working = merge_sets(working, add);
  }
  return out;
}

}  // namespace

Vector restricted_dantzig(const RegressionProblem& problem, const IndexSet& columns,
                          const Vector& bounds, double lp_tol, double lambda1_for_message,
                          const IndexSet& warm) {
  if (bounds.size() != static_cast<Index>(columns.size())) {
    throw Error(ErrorCode::dimension_mismatch, "one bound per restricted column is required");
  }
  if (columns.empty()) return Vector::Zero(problem.p());
  DantzigOptions opt;
  opt.lp_tol = lp_tol;
  return generated_dantzig(problem, columns, bounds, warm, opt, lambda1_for_message).beta;
}

IndexSet violation_scan(const RegressionProblem& problem, const Vector& beta,
                        const IndexSet& active, double lambda1, double feas_tol) {
  const Vector corr = problem.correlations(beta);
  IndexSet out;
  auto it = active.begin();
  for (Index j = 0; j < problem.p(); ++j) {
    while (it != active.end() && *it < j) ++it;
    if (it != active.end() && *it == j) continue;
    if (std::abs(corr(j)) > lambda1 + feas_tol) out.push_back(j);
  }
  return out;
}

SparseEstimate dantzig_selector(const RegressionProblem& problem, double lambda1,
                                const DantzigOptions& options) {
  return dantzig_selector(problem, lambda1, IndexSet{}, options);
}

SparseEstimate dantzig_selector(const RegressionProblem& problem, double lambda1,
                                const IndexSet& warm_set, const DantzigOptions& options) {
  require_scaled(problem);
  if (!(lambda1 >= 0.0)) throw Error(ErrorCode::invalid_argument, "lambda1 must be nonnegative");
  const Index p = problem.p();
  IndexSet all(static_cast<std::size_t>(p));
  std::iota(all.begin(), all.end(), Index{0});
  IndexSet warm = warm_set;
  std::sort(warm.begin(), warm.end());
  warm.erase(std::unique(warm.begin(), warm.end()), warm.end());
  GeneratedSolve g = generated_dantzig(problem, all, Vector::Constant(p, lambda1), warm, options, lambda1);

  SparseEstimate est = SparseEstimate::from_beta(std::move(g.beta), options.zero_tol);
  const Vector corr = problem.correlations(est.beta);
  est.feasibility_residual = std::max(0.0, corr.cwiseAbs().maxCoeff() - lambda1);
  est.iterations = g.rounds;
  est.converged = true;
  return est;
}

SolutionPath dantzig_path(const RegressionProblem& problem, const std::vector<double>& grid,
                          const DantzigOptions& options) {
  SolutionPath path;
  IndexSet warm;
  for (double lambda1 : grid) {
    SparseEstimate est = dantzig_selector(problem, lambda1, warm, options);
    warm = est.support;
    path.append(lambda1, std::move(est));
  }
  path.stop(StopReason::grid_exhausted);
  return path;
}

SparseEstimate hard_threshold(const SparseEstimate& estimate, double tau) {
  if (!(tau >= 0.0)) throw Error(ErrorCode::invalid_argument, "threshold must be nonnegative");
  Vector beta = estimate.beta;
  for (Index j = 0; j < beta.size(); ++j) {
    if (std::abs(beta(j)) < tau) beta(j) = 0.0;
  }
  SparseEstimate out = SparseEstimate::from_beta(std::move(beta));
  out.iterations = estimate.iterations;
  out.converged = estimate.converged;
  out.feasibility_residual = estimate.feasibility_residual;
  return out;
}

SparseEstimate thresholded_dantzig(const RegressionProblem& problem, double lambda1, double tau,
                                   const DantzigOptions& options) {
  if (!(tau >= 0.0)) throw Error(ErrorCode::invalid_argument, "threshold must be nonnegative");
  return hard_threshold(dantzig_selector(problem, lambda1, options), tau);
}

double cds_constraint_residual(const RegressionProblem& problem, const Vector& beta,
                               double lambda0, double lambda1) {
  const Vector corr = problem.correlations(beta);
  double worst = 0.0;
  for (Index j = 0; j < corr.size(); ++j) {
    const double bound = beta(j) != 0.0 ? lambda0 : lambda1;
    worst = std::max(worst, std::abs(corr(j)) - bound);
  }
  return worst;
}

bool in_b_lambda(const Vector& beta, double lambda) {
  for (Index j = 0; j < beta.size(); ++j) {
    if (beta(j) != 0.0 && std::abs(beta(j)) < lambda) return false;
  }
  return true;
}

SparseEstimate cds_fit_single(const RegressionProblem& problem, double lambda1,
                              const CdsConfig& config, const SparseEstimate& init) {
  config.validate();
  require_scaled(problem);
  if (init.beta.size() != problem.p()) {
    throw Error(ErrorCode::dimension_mismatch, "initial estimate length differs from p");
  }
  if (!(lambda1 >= 0.0)) throw Error(ErrorCode::invalid_argument, "lambda1 must be nonnegative");
  constexpr double kSnap = 1e-8;

  Vector beta = SparseEstimate::from_beta(init.beta).beta;
  ActiveSetState state;
  bool converged = false;
  // The iteration is deterministic, so a repeated iterate means it cycles.
  std::vector<Vector> seen;
  while (true) {
    state.active = support_of(beta);
    state.violators_last = violation_scan(problem, beta, state.active, lambda1, config.feas_tol);
    if (state.violators_last.empty()) {
      converged = true;
      break;
    }
    if (state.iteration >= config.max_active_iters) break;
    if (std::find(seen.begin(), seen.end(), beta) != seen.end()) break;
    seen.push_back(beta);
    ++state.iteration;

    // Bounds are read before the active set absorbs the violators.
    const IndexSet augmented = merge_sets(state.active, state.violators_last);
    Vector bounds(static_cast<Index>(augmented.size()));
    for (std::size_t k = 0; k < augmented.size(); ++k) {
      const bool old = std::binary_search(state.active.begin(), state.active.end(), augmented[k]);
      bounds(static_cast<Index>(k)) = old ? config.lambda0 : lambda1;
    }
    beta = restricted_dantzig(problem, augmented, bounds, config.lp_tol, lambda1, state.active);
    for (Index j = 0; j < beta.size(); ++j) {
      if (std::abs(beta(j)) < config.lambda || std::abs(beta(j)) < kSnap) beta(j) = 0.0;
    }

    state.active = support_of(beta);
    if (state.active.empty()) continue;
    beta = restricted_dantzig(problem, state.active,
                              Vector::Constant(static_cast<Index>(state.active.size()), config.lambda0),
                              config.lp_tol, lambda1);
    for (Index j = 0; j < beta.size(); ++j) {
      if (std::abs(beta(j)) < kSnap) beta(j) = 0.0;
    }
    state.beta_active = beta;
  }

  SparseEstimate est = SparseEstimate::from_beta(std::move(beta));
  est.iterations = state.iteration;
  est.converged = converged;
  est.feasibility_residual =
      std::max(0.0, cds_constraint_residual(problem, est.beta, config.lambda0, lambda1));
  return est;
}

std::vector<double> resolve_lambda1_grid(const RegressionProblem& problem, const CdsConfig& config) {
  if (config.lambda1_grid.empty()) {
    return lambda1_grid(problem, config.grid_length, config.grid_floor_ratio);
  }
  const double lmax = problem.lambda_max();
  if (!(lmax > 0.0)) throw Error(ErrorCode::degenerate_input, "zero response: lambda_max is 0");
  std::vector<double> grid{lmax};
  for (double g : config.lambda1_grid) {
    if (g < lmax) grid.push_back(g);
  }
  return grid;
}

SolutionPath cds_path(const RegressionProblem& problem, const CdsConfig& config) {
  config.validate();
  const std::vector<double> grid = resolve_lambda1_grid(problem, config);
  if (config.lambda0 > grid.back()) {
    throw Error(ErrorCode::config_error, "lambda0 exceeds the smallest lambda1 on the grid");
  }
  SolutionPath path;
  SparseEstimate previous = SparseEstimate::zeros(problem.p());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    SparseEstimate est;
    try {
      est = cds_fit_single(problem, grid[g], config, previous);
    } catch (const Error& e) {
      throw Error(e.code(), "grid position " + std::to_string(g) + ": " + e.what());
    }
    if (!est.converged) {
      // Thresholding can reject every entering violator, so the iteration
      // cycles; the walk goes on from the last converged estimate.
      path.skip(grid[g]);
      continue;
    }
    const bool inside = in_b_lambda(est.beta, config.lambda);
    previous = est;
    path.append(grid[g], std::move(est));
    // The estimate that leaves B_lambda is kept as the last entry.
    if (!inside) {
      path.stop(StopReason::left_b_lambda);
      return path;
    }
  }
  path.stop(!path.skipped().empty() && path.skipped().back() == grid.back()
                ? StopReason::iteration_cap
                : StopReason::grid_exhausted);
  return path;
}

}  // namespace cds
