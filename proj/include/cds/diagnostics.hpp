#pragma once

#include "cds/core_types.hpp"

#include <cstdint>

namespace cds {

inline constexpr std::uint64_t kDefaultEnumerationBudget = 200000;

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Exact s-restricted isometry constant over every column subset of size s
/// (larger subsets dominate smaller ones by eigenvalue interlacing):
///   max_T max(lambda_max(G_T) - 1, 1 - lambda_min(G_T)),  G_T = n^{-1} X_T^T X_T.
/// Throws Error(budget_exceeded) when C(p, s) exceeds the budget.
double restricted_isometry_constant(const DesignMatrix& x, Index s,
                                    std::uint64_t budget = kDefaultEnumerationBudget);

/// Exact theta_{s,2s}: max over disjoint T, T' with |T| <= s, |T'| <= 2s (only
/// maximal size pairs are enumerated)
/// of the largest singular value of n^{-1} X_T^T X_T'.
double restricted_orthogonality_constant(const DesignMatrix& x, Index s,
                                         std::uint64_t budget = kDefaultEnumerationBudget);

struct UupReport {
  Index s = 0;
  double delta_s = 0.0;
  double theta_s_2s = 0.0;
  bool uup_holds = false;
  std::uint64_t subsets_examined = 0;
};

UupReport uup_report(const DesignMatrix& x, Index s,
                     std::uint64_t budget = kDefaultEnumerationBudget);

/// ||n^{-1/2} X delta||_2 / max(||delta_1||_2, ||delta_1'||_2) where delta_1
/// is the first s coordinates and delta_1' the m largest-magnitude entries of
/// the rest.
double restricted_eigenvalue_ratio(const DesignMatrix& x, Index s, Index m, const Vector& delta);

/// Monte-Carlo probe of the restricted eigenvalue constant: the minimum ratio
/// over `samples` random directions in the cone ||delta_2||_1 <= ||delta_1||_1.
/// This is an upper estimate of the true infimum, never a certificate.
double restricted_eigenvalue_probe(const DesignMatrix& x, Index s, Index m, Index samples,
                                   std::uint64_t seed);

/// |{ j : sgn(beta_hat_j) != sgn(beta0_j) }| with sgn(0) = 0.
Index false_sign_count(const Vector& beta_hat, const Vector& beta0);

}  // namespace cds
