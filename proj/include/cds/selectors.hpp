#pragma once

#include "cds/core_types.hpp"
#include "cds/lp_solver.hpp"

#include <vector>

namespace cds {

struct DantzigOptions {
  double lp_tol = 1e-9;
  double feas_tol = 1e-8;
  /// Coefficients below this magnitude are stored as exact zeros.
  double zero_tol = 1e-8;
  /// Indices added to the working set per constraint-generation round, per kind.
  Index batch = 8;
};

/// L1-minimal beta subject to ||n^{-1} X^T (y - X beta)||_inf <= lambda1.
///
/// Solved by joint row/column generation on the split LP: the working set W
/// carries both the enforced rows and the free columns. A round ends when no
/// row outside W is violated and no column outside W has a negative reduced
/// cost, which certifies global optimality of the working-set solution.
SparseEstimate dantzig_selector(const RegressionProblem& problem, double lambda1,
                                const DantzigOptions& options = {});

/// As above, seeding the working set with warm_set (e.g. the previous path point).
SparseEstimate dantzig_selector(const RegressionProblem& problem, double lambda1,
                                const IndexSet& warm_set, const DantzigOptions& options);

/// Dantzig estimates along a decreasing grid with warm-started working sets.
SolutionPath dantzig_path(const RegressionProblem& problem, const std::vector<double>& grid,
                          const DantzigOptions& options = {});

/// Zeroes entries with |beta_j| < tau; no refitting.
SparseEstimate hard_threshold(const SparseEstimate& estimate, double tau);

SparseEstimate thresholded_dantzig(const RegressionProblem& problem, double lambda1, double tau,
                                   const DantzigOptions& options = {});

/// Working state of the active-set iteration for one lambda1.
struct ActiveSetState {
  IndexSet active;
  Vector beta_active;
  int iteration = 0;
  IndexSet violators_last;
};

/// Indices j outside `active` with |n^{-1} x_j^T (y - X beta)| > lambda1 + feas_tol.
IndexSet violation_scan(const RegressionProblem& problem, const Vector& beta,
                        const IndexSet& active, double lambda1, double feas_tol);

/// Dantzig problem restricted to the columns and rows in `columns`, with
/// per-coordinate correlation bounds. Returns the full-length beta (zero off
/// `columns`). `warm` seeds the row/column working set. Throws
/// Error(numerical_failure) if an LP does not solve.
Vector restricted_dantzig(const RegressionProblem& problem, const IndexSet& columns,
                          const Vector& bounds, double lp_tol, double lambda1_for_message = 0.0,
                          const IndexSet& warm = {});

/// Active-set iteration for one lambda1, starting from `init`. Returns early
/// with converged = false when an iterate repeats.
SparseEstimate cds_fit_single(const RegressionProblem& problem, double lambda1,
                              const CdsConfig& config, const SparseEstimate& init);

/// Largest violation of the constrained Dantzig constraints: lambda0 bound on
/// the support of beta and lambda1 bound off it.
double cds_constraint_residual(const RegressionProblem& problem, const Vector& beta,
                               double lambda0, double lambda1);

/// True when every nonzero entry has magnitude >= lambda.
bool in_b_lambda(const Vector& beta, double lambda);

/// Grid actually walked by the path fitters: lambda_max first, then the
/// configured entries strictly below it (or the default log grid).
std::vector<double> resolve_lambda1_grid(const RegressionProblem& problem, const CdsConfig& config);

/// Warm-started constrained Dantzig path with early stop on leaving B_lambda
/// (the estimate outside B_lambda is the last entry). A fit that does not
/// converge is recorded in skipped() and the walk goes on from the last
/// converged estimate; iteration_cap is reported when the final
/// grid value is among the skipped ones.
SolutionPath cds_path(const RegressionProblem& problem, const CdsConfig& config);

}  // namespace cds
