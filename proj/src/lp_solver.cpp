#include "cds/lp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cds {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class PhaseOutcome { optimal, unbounded, iteration_limit };

// Internal form: [A  -I] x = 0 with x = (z, r), where the logicals r are the
// row activities bounded by [l, u] and z >= 0.
class SimplexEngine {
 public:
  SimplexEngine(const LpProblem& lp, const LpOptions& opt)
      : lp_(lp), opt_(opt), nv_(lp.num_variables()), nr_(lp.num_constraints()), total_(nv_ + nr_) {
    max_iters_ = opt.max_iters > 0 ? opt.max_iters : static_cast<int>(50 * total_);
    lo_ = Vector::Zero(total_);
    hi_ = Vector::Constant(total_, kInf);
    lo_.tail(nr_) = lp.lower_bounds;
    hi_.tail(nr_) = lp.upper_bounds;
    bound_scale_ = 0.0;
    for (Index i = 0; i < nr_; ++i) {
      if (std::isfinite(lo_(nv_ + i))) bound_scale_ = std::max(bound_scale_, std::abs(lo_(nv_ + i)));
      if (std::isfinite(hi_(nv_ + i))) bound_scale_ = std::max(bound_scale_, std::abs(hi_(nv_ + i)));
    }
    if (!(opt.warm_start && load_basis(*opt.warm_start))) cold_start();
  }

  LpSolution run() {
    Vector cost = Vector::Zero(total_);
    cost.head(nv_) = lp_.objective;
    LpSolution out;
    for (int attempt = 0; attempt < 3; ++attempt) {
      const auto phase1 = iterate(nullptr);
      if (phase1 != PhaseOutcome::optimal) return finish(LpStatus::iteration_limit);
      if (infeasibility() > 1e3 * opt_.tol * std::max(1.0, bound_scale_)) {
        return finish(LpStatus::infeasible);
      }
      const auto phase2 = iterate(&cost);
      if (phase2 == PhaseOutcome::unbounded) return finish(LpStatus::unbounded);
      if (phase2 == PhaseOutcome::iteration_limit) return finish(LpStatus::iteration_limit);
      LpSolution sol = finish(LpStatus::optimal);
      const double scale = std::max(1.0, std::abs(sol.objective_value));
      if (sol.primal_residual <= opt_.tol && sol.dual_residual <= opt_.tol &&
          sol.optimality_gap <= opt_.tol * scale) {
        return sol;
      }
      out = std::move(sol);
    }
    out.status = LpStatus::iteration_limit;
    return out;
  }

 private:
  void cold_start() {
    state_.assign(static_cast<std::size_t>(total_), BasisStatus::at_lower);
    basis_.resize(static_cast<std::size_t>(nr_));
    for (Index i = 0; i < nr_; ++i) {
      basis_[static_cast<std::size_t>(i)] = nv_ + i;
      state_[static_cast<std::size_t>(nv_ + i)] = BasisStatus::basic;
    }
    x_ = Vector::Zero(total_);
    refactor();
  }

  bool load_basis(const LpBasis& warm) {
    if (static_cast<Index>(warm.variables.size()) != nv_ || static_cast<Index>(warm.rows.size()) != nr_) {
      return false;
    }
    state_.assign(static_cast<std::size_t>(total_), BasisStatus::at_lower);
    basis_.clear();
    x_ = Vector::Zero(total_);
    for (Index j = 0; j < total_; ++j) {
      const BasisStatus st = j < nv_ ? warm.variables[static_cast<std::size_t>(j)]
                                     : warm.rows[static_cast<std::size_t>(j - nv_)];
      state_[static_cast<std::size_t>(j)] = st;
      if (st == BasisStatus::basic) {
        basis_.push_back(j);
        continue;
      }
      const double bound = st == BasisStatus::at_lower ? lo_(j) : hi_(j);
      if (!std::isfinite(bound)) return false;
      x_(j) = bound;
    }
    if (static_cast<Index>(basis_.size()) != nr_) return false;
    return refactor();
  }

  void column(Index j, Eigen::Ref<Vector> out) const {
    if (j < nv_) {
      out = lp_.constraint_matrix.col(j);
      return;
    }
    out.setZero();
    out(j - nv_) = -1.0;
  }

  // Returns false when the basis matrix is numerically singular.
  bool refactor() {
    Matrix b(nr_, nr_);
    for (Index i = 0; i < nr_; ++i) column(basis_[static_cast<std::size_t>(i)], b.col(i));
    Eigen::PartialPivLU<Matrix> lu(b);
    const Vector diag = lu.matrixLU().diagonal().cwiseAbs();
    if (!(diag.minCoeff() > 1e-11 * std::max(1.0, diag.maxCoeff()))) return false;
    binv_ = lu.inverse();
    since_refactor_ = 0;
    compute_basic_values();
    return true;
  }

  void compute_basic_values() {
    Vector rhs = Vector::Zero(nr_);
    for (Index j = 0; j < total_; ++j) {
      if (state_[static_cast<std::size_t>(j)] == BasisStatus::basic || x_(j) == 0.0) continue;
      if (j < nv_) {
        rhs.noalias() -= lp_.constraint_matrix.col(j) * x_(j);
      } else {
        rhs(j - nv_) += x_(j);
      }
    }
    const Vector xb = binv_ * rhs;
    for (Index i = 0; i < nr_; ++i) x_(basis_[static_cast<std::size_t>(i)]) = xb(i);
  }

  double violation(Index j) const {
    return std::max({0.0, lo_(j) - x_(j), x_(j) - hi_(j)});
  }

  double infeasibility() const {
    double sum = 0.0;
    for (Index j : basis_) sum += violation(j);
    return sum;
  }

  // Reduced costs for `cost`, or for the phase-one sum of violations when
  // cost is null. Returns false in phase one once nothing is violated.
  bool price(const Vector* cost, Vector& d) const {
    Vector cb(nr_);
    bool any = false;
    for (Index i = 0; i < nr_; ++i) {
      const Index j = basis_[static_cast<std::size_t>(i)];
      if (cost) {
        cb(i) = (*cost)(j);
      } else if (x_(j) < lo_(j) - opt_.tol) {
        cb(i) = -1.0;
        any = true;
      } else if (x_(j) > hi_(j) + opt_.tol) {
        cb(i) = 1.0;
        any = true;
      } else {
        cb(i) = 0.0;
      }
    }
    if (!cost && !any) return false;
    const Vector y = binv_.transpose() * cb;
    d.resize(total_);
    d.head(nv_) = -(lp_.constraint_matrix.transpose() * y);
    if (cost) d.head(nv_) += cost->head(nv_);
    d.tail(nr_) = y;
    if (cost) d.tail(nr_) += cost->tail(nr_);
    return true;
  }

  PhaseOutcome iterate(const Vector* cost) {
    const bool phase1 = cost == nullptr;
    int degenerate_run = 0;
    bool bland = false;
    Vector alpha(nr_);
    Vector d;
    bool prices_valid = false;
    const double dtol = opt_.tol;
    while (true) {
      // A bound flip leaves the basis, and so the prices, unchanged.
      if (!prices_valid && !price(cost, d)) return PhaseOutcome::optimal;
      prices_valid = false;

      Index q = -1;
      double best = 0.0;
      for (Index j = 0; j < total_; ++j) {
        const BasisStatus st = state_[static_cast<std::size_t>(j)];
        if (st == BasisStatus::basic || !(hi_(j) > lo_(j))) continue;
        double score = 0.0;
        if (st == BasisStatus::at_lower && d(j) < -dtol) score = -d(j);
        if (st == BasisStatus::at_upper && d(j) > dtol) score = d(j);
        if (score <= 0.0) continue;
        if (bland) {
          q = j;
          break;
        }
        if (score > best) {
          best = score;
          q = j;
        }
      }
      if (q < 0) {
        if (since_refactor_ == 0) return PhaseOutcome::optimal;
        if (!refactor()) return PhaseOutcome::iteration_limit;
        continue;
      }
      if (iterations_ >= max_iters_) return PhaseOutcome::iteration_limit;
      ++iterations_;

      column(q, alpha);
      alpha = binv_ * alpha;
      const double dir = state_[static_cast<std::size_t>(q)] == BasisStatus::at_lower ? 1.0 : -1.0;
      const double piv_tol = 1e-9 * std::max(1.0, alpha.cwiseAbs().maxCoeff());
      const double harris = bland ? 0.0 : 0.1 * opt_.tol;

      // Basic variable i moves at rate -dir * alpha(i) per unit step. In phase
      // one a violated variable blocks only where it regains its bound.
      auto ratio = [&](Index i, double slack, BasisStatus& hits) -> double {
        const double rate = -dir * alpha(i);
        const Index var = basis_[static_cast<std::size_t>(i)];
        const double lo = lo_(var);
        const double hi = hi_(var);
        const double xv = x_(var);
        if (phase1 && xv < lo - opt_.tol) {
          hits = BasisStatus::at_lower;
          return rate > 0.0 ? (lo - xv + slack) / rate : kInf;
        }
        if (phase1 && xv > hi + opt_.tol) {
          hits = BasisStatus::at_upper;
          return rate < 0.0 ? (xv - hi + slack) / -rate : kInf;
        }
        if (rate < 0.0 && std::isfinite(lo)) {
          hits = BasisStatus::at_lower;
          return (xv - lo + slack) / -rate;
        }
        if (rate > 0.0 && std::isfinite(hi)) {
          hits = BasisStatus::at_upper;
          return (hi - xv + slack) / rate;
        }
        return kInf;
      };

      BasisStatus hits = BasisStatus::at_lower;
      double t_bound = kInf;
      for (Index i = 0; i < nr_; ++i) {
        if (std::abs(alpha(i)) <= piv_tol) continue;
        t_bound = std::min(t_bound, ratio(i, harris, hits));
      }
      Index leave = -1;
      double step = kInf;
      double leave_pivot = 0.0;
      BasisStatus leave_bound = BasisStatus::at_lower;
      for (Index i = 0; i < nr_; ++i) {
        if (std::abs(alpha(i)) <= piv_tol) continue;
        const double t = ratio(i, 0.0, hits);
        if (!std::isfinite(t) || t > t_bound) continue;
        const bool better =
            bland ? (leave < 0 || t < step ||
                     (t == step && basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]))
                  : (leave < 0 || std::abs(alpha(i)) > leave_pivot);
        if (better) {
          leave = i;
          step = t;
          leave_pivot = std::abs(alpha(i));
          leave_bound = hits;
        }
      }
      step = std::max(step, 0.0);
      const double flip = hi_(q) - lo_(q);
      if (std::isfinite(flip) && flip <= step) {
        // Bound flip: the entering variable runs into its own opposite bound.
        for (Index i = 0; i < nr_; ++i) x_(basis_[static_cast<std::size_t>(i)]) -= dir * flip * alpha(i);
        const bool was_lower = state_[static_cast<std::size_t>(q)] == BasisStatus::at_lower;
        x_(q) = was_lower ? hi_(q) : lo_(q);
        state_[static_cast<std::size_t>(q)] = was_lower ? BasisStatus::at_upper : BasisStatus::at_lower;
        degenerate_run = 0;
        bland = false;
        // Phase-one costs depend on which variables are violated.
        prices_valid = !phase1;
        continue;
      }
      if (leave < 0) return PhaseOutcome::unbounded;

      for (Index i = 0; i < nr_; ++i) x_(basis_[static_cast<std::size_t>(i)]) -= dir * step * alpha(i);
      const Index out_var = basis_[static_cast<std::size_t>(leave)];
      x_(out_var) = leave_bound == BasisStatus::at_lower ? lo_(out_var) : hi_(out_var);
      state_[static_cast<std::size_t>(out_var)] = leave_bound;
      x_(q) += dir * step;
      state_[static_cast<std::size_t>(q)] = BasisStatus::basic;
      basis_[static_cast<std::size_t>(leave)] = q;

      // Eta update of the explicit inverse as one rank-1 correction.
      const Eigen::RowVectorXd pivot_row = binv_.row(leave) / alpha(leave);
      alpha(leave) -= 1.0;
      binv_.noalias() -= alpha * pivot_row;
      if (++since_refactor_ >= opt_.refactor_every && !refactor()) return PhaseOutcome::iteration_limit;

      if (step <= 1e-12) {
        if (++degenerate_run >= opt_.degeneracy_limit) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
    }
  }

  LpSolution finish(LpStatus status) {
    if (since_refactor_ > 0) refactor();
    LpSolution s;
    s.status = status;
    s.iterations = iterations_;
    s.z = x_.head(nv_);
    const Vector activity = lp_.constraint_matrix * s.z;
    s.objective_value = lp_.objective.dot(s.z);
    double primal = std::max(0.0, -s.z.minCoeff());
    for (Index i = 0; i < nr_; ++i) {
      primal = std::max(primal, lp_.lower_bounds(i) - activity(i));
      primal = std::max(primal, activity(i) - lp_.upper_bounds(i));
    }
    s.primal_residual = primal;

    Vector cost = Vector::Zero(total_);
    cost.head(nv_) = lp_.objective;
    Vector d;
    price(&cost, d);
    Vector cb(nr_);
    for (Index i = 0; i < nr_; ++i) cb(i) = cost(basis_[static_cast<std::size_t>(i)]);
    s.row_duals = binv_.transpose() * cb;
    double dual = 0.0;
    double bound = 0.0;
    double value = 0.0;
    for (Index j = 0; j < total_; ++j) {
      // Lagrangian lower bound: minimize d_j x_j over the variable's box.
      const double xj = j < nv_ ? s.z(j) : activity(j - nv_);
      value += d(j) * xj;
      if (d(j) >= 0.0) {
        if (std::isfinite(lo_(j))) {
          bound += d(j) * lo_(j);
        } else {
          dual = std::max(dual, d(j));
        }
      } else {
        if (std::isfinite(hi_(j))) {
          bound += d(j) * hi_(j);
        } else {
          dual = std::max(dual, -d(j));
        }
      }
    }
    s.dual_residual = dual;
    s.optimality_gap = std::max(0.0, value - bound);
    s.basis.variables.assign(state_.begin(), state_.begin() + nv_);
    s.basis.rows.assign(state_.begin() + nv_, state_.end());
    return s;
  }

  const LpProblem& lp_;
  LpOptions opt_;
  Index nv_;
  Index nr_;
  Index total_;
  int max_iters_ = 0;
  int iterations_ = 0;
  int since_refactor_ = 0;
  double bound_scale_ = 0.0;
  Vector lo_;
  Vector hi_;
  Vector x_;
  std::vector<Index> basis_;
  std::vector<BasisStatus> state_;
  Matrix binv_;
};

}  // namespace

void LpProblem::validate() const {
  const Index m = objective.size();
  const Index k = constraint_matrix.rows();
  if (m < 1) throw Error(ErrorCode::invalid_argument, "LP needs at least one variable");
  if (constraint_matrix.cols() != m) {
    throw Error(ErrorCode::dimension_mismatch, "constraint matrix column count differs from objective length");
  }
  if (lower_bounds.size() != k || upper_bounds.size() != k) {
    throw Error(ErrorCode::dimension_mismatch, "row bound vectors must have one entry per constraint");
  }
  if (!objective.allFinite() || !constraint_matrix.allFinite()) {
    throw Error(ErrorCode::invalid_argument, "LP objective and matrix must be finite");
  }
  for (Index i = 0; i < k; ++i) {
    if (std::isnan(lower_bounds(i)) || std::isnan(upper_bounds(i)) ||
        lower_bounds(i) > upper_bounds(i) || lower_bounds(i) == kInf ||
        upper_bounds(i) == -kInf) {
      throw Error(ErrorCode::invalid_argument, "row " + std::to_string(i) + " has invalid bounds");
    }
  }
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration-limit";
  }
  return "unknown";
}

LpSolution solve_lp(const LpProblem& problem, const LpOptions& options) {
  problem.validate();
  if (!(options.tol > 0.0)) throw Error(ErrorCode::invalid_argument, "LP tolerance must be positive");
  if (problem.num_constraints() == 0) {
    // Only z >= 0: optimal at zero unless some cost is negative.
    LpSolution s;
    s.z = Vector::Zero(problem.num_variables());
    s.row_duals = Vector();
    s.status = problem.objective.minCoeff() < 0.0 ? LpStatus::unbounded : LpStatus::optimal;
    return s;
  }
  SimplexEngine engine(problem, options);
  return engine.run();
}

}  // namespace cds
