#pragma once

#include "cds/core_types.hpp"

#include <cstdint>
#include <vector>

namespace cds {

/// minimize c^T z  subject to  lower <= A z <= upper,  z >= 0.
///
/// Row bounds may be infinite to express one-sided rows; equal bounds give an
/// equality row. Matrix and objective entries must be finite.
struct LpProblem {
  Vector objective;
  Matrix constraint_matrix;
  Vector lower_bounds;
  Vector upper_bounds;

  Index num_variables() const noexcept { return objective.size(); }
  Index num_constraints() const noexcept { return constraint_matrix.rows(); }

  /// Throws Error(dimension_mismatch / invalid_argument) on a malformed problem.
  void validate() const;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

enum class BasisStatus : std::uint8_t { basic, at_lower, at_upper };

/// Simplex basis: one status per variable z_j and per row activity.
struct LpBasis {
  std::vector<BasisStatus> variables;
  std::vector<BasisStatus> rows;
};

const char* to_string(LpStatus status);

struct LpSolution {
  Vector z;
  double objective_value = 0.0;
  LpStatus status = LpStatus::iteration_limit;
  int iterations = 0;
  /// Row multipliers y: the reduced cost of z_j is c_j - y^T A_j.
  Vector row_duals;
  /// Largest bound violation of z >= 0 and of the row bounds.
  double primal_residual = 0.0;
  /// Largest violation of reduced-cost sign conditions.
  double dual_residual = 0.0;
  /// c^T z minus the Lagrangian lower bound implied by row_duals.
  double optimality_gap = 0.0;
  /// Final basis, reusable as a warm start for a related problem.
  LpBasis basis;
};

struct LpOptions {
  double tol = 1e-9;
  /// 0 selects 50 * (m + k).
  int max_iters = 0;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  int degeneracy_limit = 40;
  /// Pivots between fresh factorizations of the basis.
  int refactor_every = 64;
  /// Starting basis; ignored (cold start) when its shape or rank is wrong.
  const LpBasis* warm_start = nullptr;
};

/// Bounded-variable revised simplex with native range rows. Phase one
/// minimizes the sum of bound violations from the starting basis (all row
/// activities basic on a cold start). Entering ties break toward the lowest
/// index, so results are deterministic.
LpSolution solve_lp(const LpProblem& problem, const LpOptions& options = {});

inline LpSolution solve_lp(const LpProblem& problem, double tol, int max_iters) {
  LpOptions o;
  o.tol = tol;
  o.max_iters = max_iters;
  return solve_lp(problem, o);
}

}  // namespace cds
