#include "cds/dantzig_lp.hpp"

#include <cmath>

namespace cds {

LpProblem dantzig_lp_from_gram(const Matrix& gram, const Vector& corr, const Vector& bounds) {
  const Index p = gram.rows();
  if (gram.cols() != p || corr.size() != p || bounds.size() != p) {
    throw Error(ErrorCode::dimension_mismatch, "Dantzig LP: gram, correlation and bound sizes differ");
  }
  if ((bounds.array() < 0.0).any() || !bounds.allFinite()) {
    throw Error(ErrorCode::invalid_argument, "Dantzig LP: bounds must be finite and nonnegative");
  }
  LpProblem lp;
  lp.objective = Vector::Ones(2 * p);
  lp.constraint_matrix.resize(p, 2 * p);
  lp.constraint_matrix.leftCols(p) = gram;
  lp.constraint_matrix.rightCols(p) = -gram;
  lp.lower_bounds = corr - bounds;
  lp.upper_bounds = corr + bounds;
  return lp;
}

LpProblem dantzig_lp_reformulation(const DesignMatrix& x, const Vector& y, const Vector& bounds) {
  if (y.size() != x.n()) throw Error(ErrorCode::dimension_mismatch, "Dantzig LP: response length differs from n");
  if (bounds.size() != x.p()) throw Error(ErrorCode::dimension_mismatch, "Dantzig LP: bound vector length differs from p");
  if (!x.column_scaled()) throw Error(ErrorCode::invalid_argument, "Dantzig LP: design columns must be rescaled");
  const double inv_n = 1.0 / static_cast<double>(x.n());
  const Matrix gram = x.values().transpose() * x.values() * inv_n;
  const Vector corr = x.values().transpose() * y * inv_n;
  return dantzig_lp_from_gram(gram, corr, bounds);
}

void cancel_split(Vector& z) {
  const Index p = z.size() / 2;
  for (Index j = 0; j < p; ++j) {
    const double t = std::min(z(j), z(p + j));
    if (t > 0.0) {
      z(j) -= t;
      z(p + j) -= t;
    }
  }
}

Vector split_to_beta(const Vector& z) {
  const Index p = z.size() / 2;
  return z.head(p) - z.tail(p);
}

}  // namespace cds
