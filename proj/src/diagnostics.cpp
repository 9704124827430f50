#include "cds/diagnostics.hpp"

#include "cds/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cds {

namespace {

// Advances a sorted k-combination of {0..n-1}; false after the last one.
bool next_combination(std::vector<Index>& c, Index n) {
  const auto k = static_cast<Index>(c.size());
  for (Index i = k - 1; i >= 0; --i) {
    if (c[i] < n - k + i) {
      ++c[i];
      for (Index j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

std::vector<Index> first_combination(Index k) {
  std::vector<Index> c(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) c[i] = i;
  return c;
}

Matrix gram_of(const DesignMatrix& x) {
  return x.values().transpose() * x.values() / static_cast<double>(x.n());
}

void check_s(const DesignMatrix& x, Index s) {
  if (s < 1 || s > x.p()) throw Error(ErrorCode::invalid_argument, "s must lie in [1, p]");
}

void check_budget(std::uint64_t count, std::uint64_t budget) {
  if (count > budget) {
    throw Error(ErrorCode::budget_exceeded,
                "subset enumeration needs " + std::to_string(count) + " subsets, budget is " +
                    std::to_string(budget) + "; use a sampling probe instead");
  }
}

// Block sizes (|T|, |T'|) that are maximal among disjoint pairs with
// |T| <= s, |T'| <= 2s. When p >= 3s only (s, 2s) is needed.
std::vector<std::pair<Index, Index>> theta_block_sizes(Index p, Index s) {
  std::vector<std::pair<Index, Index>> sizes;
  for (Index a = 1; a <= s; ++a) {
    const Index b = std::min(2 * s, p - a);
    if (b < 1) continue;
    if (a < s && b == 2 * s && p - s >= 2 * s) continue;
    sizes.emplace_back(a, b);
  }
  return sizes;
}

double delta_impl(const Matrix& gram, Index s, std::uint64_t& examined) {
  const Index p = gram.rows();
  double delta = 0.0;
  auto t = first_combination(s);
  Matrix sub(s, s);
  Eigen::SelfAdjointEigenSolver<Matrix> eig;
  do {
    for (Index a = 0; a < s; ++a)
      for (Index b = 0; b < s; ++b) sub(a, b) = gram(t[a], t[b]);
    eig.compute(sub, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    delta = std::max({delta, ev(s - 1) - 1.0, 1.0 - ev(0)});
    ++examined;
  } while (next_combination(t, p));
  return delta;
}

double theta_impl(const Matrix& gram, Index s, std::uint64_t& examined) {
  const Index p = gram.rows();
  double theta = 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig;
  std::vector<Index> rest;
  for (const auto& [a, b] : theta_block_sizes(p, s)) {
    Matrix cross(a, b);
    auto t = first_combination(a);
    do {
      rest.clear();
      for (Index j = 0, k = 0; j < p; ++j) {
        if (k < a && t[k] == j) {
          ++k;
          continue;
        }
        rest.push_back(j);
      }
      auto u = first_combination(b);
      do {
        for (Index r = 0; r < a; ++r)
          for (Index c = 0; c < b; ++c) cross(r, c) = gram(t[r], rest[u[c]]);
        // sigma_max^2 = lambda_max(C C^T); the |T| side is the small one.
        eig.compute(cross * cross.transpose(), Eigen::EigenvaluesOnly);
        theta = std::max(theta, std::sqrt(std::max(0.0, eig.eigenvalues()(a - 1))));
        ++examined;
      } while (next_combination(u, static_cast<Index>(rest.size())));
    } while (next_combination(t, p));
  }
  return theta;
}

}  // namespace

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  long double acc = 1.0L;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (acc > static_cast<long double>(std::numeric_limits<std::uint64_t>::max())) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return static_cast<std::uint64_t>(std::llround(acc));
}

double restricted_isometry_constant(const DesignMatrix& x, Index s, std::uint64_t budget) {
  check_s(x, s);
  check_budget(binomial(static_cast<std::uint64_t>(x.p()), static_cast<std::uint64_t>(s)), budget);
  std::uint64_t examined = 0;
  return delta_impl(gram_of(x), s, examined);
}

namespace {

std::uint64_t theta_count(Index p, Index s) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 0;
  for (const auto& [a, b] : theta_block_sizes(p, s)) {
    const auto left = binomial(static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(a));
    const auto right = binomial(static_cast<std::uint64_t>(p - a), static_cast<std::uint64_t>(b));
    if (right != 0 && left > kMax / right) return kMax;
    if (total > kMax - left * right) return kMax;
    total += left * right;
  }
  return total;
}

}  // namespace

double restricted_orthogonality_constant(const DesignMatrix& x, Index s, std::uint64_t budget) {
  check_s(x, s);
  check_budget(theta_count(x.p(), s), budget);
  std::uint64_t examined = 0;
  return theta_impl(gram_of(x), s, examined);
}

UupReport uup_report(const DesignMatrix& x, Index s, std::uint64_t budget) {
  check_s(x, s);
  const auto delta_count = binomial(static_cast<std::uint64_t>(x.p()), static_cast<std::uint64_t>(s));
  check_budget(delta_count, budget);
  check_budget(theta_count(x.p(), s), budget);
  const Matrix gram = gram_of(x);
  UupReport r;
  r.s = s;
  r.delta_s = delta_impl(gram, s, r.subsets_examined);
  r.theta_s_2s = theta_impl(gram, s, r.subsets_examined);
  r.uup_holds = r.delta_s + r.theta_s_2s < 1.0;
  return r;
}

double restricted_eigenvalue_ratio(const DesignMatrix& x, Index s, Index m, const Vector& delta) {
  if (delta.size() != x.p()) throw Error(ErrorCode::dimension_mismatch, "direction length differs from p");
  check_s(x, s);
  const Index rest = x.p() - s;
  std::vector<double> tail(static_cast<std::size_t>(rest));
  for (Index j = 0; j < rest; ++j) tail[j] = std::abs(delta(s + j));
  const Index top = std::clamp<Index>(m, 0, rest);
  std::partial_sort(tail.begin(), tail.begin() + top, tail.end(), std::greater<>());
  double top_sq = 0.0;
  for (Index j = 0; j < top; ++j) top_sq += tail[j] * tail[j];
  const double denom = std::max(delta.head(s).norm(), std::sqrt(top_sq));
  if (!(denom > 0.0)) throw Error(ErrorCode::invalid_argument, "direction has zero leading block");
  return (x.values() * delta).norm() / std::sqrt(static_cast<double>(x.n())) / denom;
}

double restricted_eigenvalue_probe(const DesignMatrix& x, Index s, Index m, Index samples,
                                   std::uint64_t seed) {
  check_s(x, s);
  if (samples < 1) throw Error(ErrorCode::invalid_argument, "probe needs at least one sample");
  if (m < 1) throw Error(ErrorCode::invalid_argument, "m must be positive");
  Rng rng(seed);
  const Index rest = x.p() - s;
  double best = std::numeric_limits<double>::infinity();
  Vector delta(x.p());
  for (Index k = 0; k < samples; ++k) {
    for (Index j = 0; j < s; ++j) delta(j) = rng.normal();
    const double mass = rng.uniform() * delta.head(s).lpNorm<1>();
    double total = 0.0;
    for (Index j = 0; j < rest; ++j) {
      delta(s + j) = rng.exponential();
      total += delta(s + j);
    }
    for (Index j = 0; j < rest; ++j) {
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      delta(s + j) = total > 0.0 ? sign * mass * delta(s + j) / total : 0.0;
    }
    best = std::min(best, restricted_eigenvalue_ratio(x, s, m, delta));
  }
  return best;
}

Index false_sign_count(const Vector& beta_hat, const Vector& beta0) {
  if (beta_hat.size() != beta0.size()) throw Error(ErrorCode::dimension_mismatch, "length mismatch");
  auto sgn = [](double v) { return (v > 0.0) - (v < 0.0); };
  Index count = 0;
  for (Index j = 0; j < beta0.size(); ++j) count += sgn(beta_hat(j)) != sgn(beta0(j));
  return count;
}

}  // namespace cds
