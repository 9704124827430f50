#pragma once

// Slow, independent reference computations used as test oracles. Nothing
// here calls the library's solvers.

#include "cds/core_types.hpp"
#include "cds/lp_solver.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

using cds::Index;
using cds::Matrix;
using cds::Vector;

// Calls visit(subset) for every k-subset of {0..n-1} in lexicographic order.
inline void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& visit) {
  if (k > n || k < 0) return;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    visit(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

// A hyperplane a^T z = b.
struct Plane {
  Vector a;
  double b;
};

// Minimum of f over all points where some m linearly independent planes meet
// and every constraint holds (feasible(z) within tol). Returns nullopt when no
// such point exists.
inline std::optional<double> vertex_minimum(const std::vector<Plane>& planes, Index m,
                                            const std::function<bool(const Vector&)>& feasible,
                                            const std::function<double(const Vector&)>& f,
                                            Vector* argmin = nullptr) {
  std::optional<double> best;
  Matrix a(m, m);
  Vector b(m);
  for_each_subset(static_cast<int>(planes.size()), static_cast<int>(m), [&](const std::vector<int>& pick) {
    for (Index r = 0; r < m; ++r) {
      a.row(r) = planes[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])].a.transpose();
      b(r) = planes[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])].b;
    }
    Eigen::FullPivLU<Matrix> lu(a);
    if (lu.rank() < m) return;
    const Vector z = lu.solve(b);
    if (!z.allFinite() || !feasible(z)) return;
    const double v = f(z);
    if (!best || v < *best) {
      best = v;
      if (argmin) *argmin = z;
    }
  });
  return best;
}

// Basic feasible solution enumeration for min c^T z, l <= Az <= u, z >= 0.
inline std::optional<double> lp_minimum(const cds::LpProblem& lp, double tol = 1e-9) {
  const Index m = lp.num_variables();
  const Index k = lp.num_constraints();
  std::vector<Plane> planes;
  for (Index j = 0; j < m; ++j) planes.push_back({Vector::Unit(m, j), 0.0});
  for (Index i = 0; i < k; ++i) {
    const Vector row = lp.constraint_matrix.row(i).transpose();
    if (std::isfinite(lp.lower_bounds(i))) planes.push_back({row, lp.lower_bounds(i)});
    if (std::isfinite(lp.upper_bounds(i)) && lp.upper_bounds(i) != lp.lower_bounds(i)) {
      planes.push_back({row, lp.upper_bounds(i)});
    }
  }
  auto feasible = [&](const Vector& z) {
    if ((z.array() < -tol).any()) return false;
    const Vector az = lp.constraint_matrix * z;
    for (Index i = 0; i < k; ++i) {
      const double scale = 1.0 + std::abs(az(i));
      if (az(i) < lp.lower_bounds(i) - tol * scale || az(i) > lp.upper_bounds(i) + tol * scale) return false;
    }
    return true;
  };
  return vertex_minimum(planes, m, feasible, [&](const Vector& z) { return lp.objective.dot(z); });
}

// min ||beta||_1 subject to |corr - gram beta| <= bounds, by enumerating the
// vertices of the arrangement {beta_j = 0} and {(gram beta)_i = corr_i +- bounds_i}.
inline double dantzig_l1_minimum(const Matrix& gram, const Vector& corr, const Vector& bounds,
                                 Vector* argmin = nullptr) {
  const Index p = gram.rows();
  std::vector<Plane> planes;
  for (Index j = 0; j < p; ++j) planes.push_back({Vector::Unit(p, j), 0.0});
  for (Index i = 0; i < p; ++i) {
    planes.push_back({gram.row(i).transpose(), corr(i) - bounds(i)});
    if (bounds(i) > 0) planes.push_back({gram.row(i).transpose(), corr(i) + bounds(i)});
  }
  auto feasible = [&](const Vector& beta) {
    const Vector r = corr - gram * beta;
    for (Index i = 0; i < p; ++i) {
      if (std::abs(r(i)) > bounds(i) + 1e-9) return false;
    }
    return true;
  };
  const auto best = vertex_minimum(planes, p, feasible, [](const Vector& b) { return b.lpNorm<1>(); }, argmin);
  return best ? *best : std::numeric_limits<double>::infinity();
}

// Weighted elastic net objective (2n)^{-1}||y - X b||^2 + lambda sum w_j (alpha|b_j| + (1-alpha)/2 b_j^2).
inline double enet_objective(const Matrix& x, const Vector& y, const Vector& b, double lambda, double alpha,
                             const Vector& w) {
  const double n = static_cast<double>(x.rows());
  return (y - x * b).squaredNorm() / (2 * n) +
         lambda * (w.array() * (alpha * b.array().abs() + 0.5 * (1 - alpha) * b.array().square())).sum();
}

// Accelerated proximal gradient for the weighted Lasso (2n)^{-1}||y - X b||^2 + lambda sum w_j |b_j|.
inline Vector lasso_fista(const Matrix& x, const Vector& y, double lambda, const Vector& w, int iters = 200000,
                          double tol = 1e-14) {
  const double n = static_cast<double>(x.rows());
  const Matrix gram = x.transpose() * x / n;
  const Vector xty = x.transpose() * y / n;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  const double step = 1.0 / std::max(es.eigenvalues().maxCoeff(), 1e-12);
  Vector b = Vector::Zero(x.cols());
  Vector z = b;
  double t = 1.0;
  for (int it = 0; it < iters; ++it) {
    const Vector g = gram * z - xty;
    Vector next = z - step * g;
    for (Index j = 0; j < next.size(); ++j) {
      const double thr = step * lambda * w(j);
      next(j) = next(j) > thr ? next(j) - thr : (next(j) < -thr ? next(j) + thr : 0.0);
    }
    const double tn = 0.5 * (1 + std::sqrt(1 + 4 * t * t));
    z = next + ((t - 1) / tn) * (next - b);
    const double change = (next - b).lpNorm<Eigen::Infinity>();
    b = next;
    t = tn;
    if (change < tol) break;
  }
  return b;
}

// Gaussian matrix with unit-norm-sqrt(n) columns from std::mt19937_64 (an
// RNG unrelated to the library's).
inline Matrix gaussian_scaled(Index n, Index p, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  Matrix x(n, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < n; ++i) x(i, j) = nd(gen);
    x.col(j) *= std::sqrt(static_cast<double>(n)) / x.col(j).norm();
  }
  return x;
}

inline Vector gaussian_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = nd(gen);
  return v;
}

// Random bounded feasible LP: rows bracket A z* for a random z* >= 0, some
// rows are one-sided or equalities, and a final sum row bounds the region.
inline cds::LpProblem random_lp(Index m, Index k, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  cds::LpProblem lp;
  lp.objective.resize(m);
  for (Index j = 0; j < m; ++j) lp.objective(j) = nd(gen);
  lp.constraint_matrix.resize(k, m);
  lp.lower_bounds.resize(k);
  lp.upper_bounds.resize(k);
  Vector zstar(m);
  for (Index j = 0; j < m; ++j) zstar(j) = ud(gen) < 0.3 ? 0.0 : 2.0 * ud(gen);
  const double inf = std::numeric_limits<double>::infinity();
  for (Index i = 0; i + 1 < k; ++i) {
    for (Index j = 0; j < m; ++j) lp.constraint_matrix(i, j) = nd(gen);
    const double v = lp.constraint_matrix.row(i).dot(zstar);
    const double kind = ud(gen);
    if (kind < 0.15) {
      lp.lower_bounds(i) = v;
      lp.upper_bounds(i) = v;
    } else if (kind < 0.35) {
      lp.lower_bounds(i) = -inf;
      lp.upper_bounds(i) = v + ud(gen);
    } else if (kind < 0.5) {
      lp.lower_bounds(i) = v - ud(gen);
      lp.upper_bounds(i) = inf;
    } else {
      lp.lower_bounds(i) = v - ud(gen);
      lp.upper_bounds(i) = v + ud(gen);
    }
  }
  lp.constraint_matrix.row(k - 1).setOnes();
  lp.lower_bounds(k - 1) = 0.0;
  lp.upper_bounds(k - 1) = zstar.sum() + 1.0 + 3.0 * ud(gen);
  return lp;
}

}  // namespace oracle
