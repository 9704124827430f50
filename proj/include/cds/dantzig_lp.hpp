#pragma once

#include "cds/core_types.hpp"
#include "cds/lp_solver.hpp"

namespace cds {

/// LP over z = (u, v) >= 0 with beta = u - v:
///   minimize sum(u + v)  s.t.  corr - bounds <= gram (u - v) <= corr + bounds.
/// gram is n^{-1} X^T X and corr is n^{-1} X^T y for the columns involved.
LpProblem dantzig_lp_from_gram(const Matrix& gram, const Vector& corr, const Vector& bounds);

/// Dantzig-type LP with per-coordinate bounds b:
///   |n^{-1} X^T (y - X beta)| <= b componentwise.
LpProblem dantzig_lp_reformulation(const DesignMatrix& x, const Vector& y, const Vector& bounds);

/// Removes simultaneous positive parts: t = min(u_j, v_j) is subtracted from
/// both halves. beta = u - v and feasibility are unchanged.
void cancel_split(Vector& z);

/// beta = u - v from a split LP solution of length 2p.
Vector split_to_beta(const Vector& z);

}  // namespace cds
