#pragma once

#include "cds/core_types.hpp"
#include "cds/random.hpp"

#include <cstdint>
#include <vector>

namespace cds {

enum class DesignKind { equicorrelated, ar1 };

const char* to_string(DesignKind kind);

struct SimDesign {
  DesignKind kind = DesignKind::equicorrelated;
  Index n = 100;
  Index p = 1000;
  /// r for the equicorrelated design, rho for AR(1).
  double correlation = 0.0;
  TrueModel truth;
  bool noiseless = false;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Raw covariate rows (before column rescaling), drawn row by row.
///   equicorrelated: x_j = sqrt(r) z + sqrt(1 - r) w_j     (z, w_j iid N(0,1))
///   ar1:            x_1 = w_1, x_j = rho x_{j-1} + sqrt(1 - rho^2) w_j
Matrix draw_raw_rows(const SimDesign& design, Index rows, Rng& rng);

/// Rows iid N(0, Gamma_r), columns rescaled to norm sqrt(n), y = X beta0 (+ sigma eps).
RegressionProblem generate_equicorrelated(const SimDesign& design);

/// Rows iid N(0, (rho^{|i-j|})), columns rescaled, y = X beta0 (+ sigma eps).
RegressionProblem generate_ar1(const SimDesign& design);

RegressionProblem generate(const SimDesign& design);

/// Population covariance of the generating construction (p x p).
Matrix population_covariance(DesignKind kind, Index p, double correlation);

/// (1, -0.5, 0.7, -1.2, -0.9, 0.3, 0.55) in the first seven coordinates.
Vector sparse_recovery_beta(Index p);

/// v = (0.6, 0, 0, -0.6, 0, 0, 0.05, 0, 0, -0.05, 0, 0) repeated three times, then zeros.
Vector strong_weak_beta(Index p);

/// Monte-Carlo E(Y - x^T beta)^2 for each beta on one fresh test sample of
/// `size` rows. Raw test rows are mapped with the training design's column
/// centers and scales; Y = x^T beta0 + sigma eps in those coordinates.
std::vector<double> prediction_errors(const SimDesign& design, const DesignMatrix& training,
                                      Index size, std::uint64_t seed,
                                      const std::vector<Vector>& betas);

double make_test_sample(const SimDesign& design, const DesignMatrix& training, Index size,
                        const Vector& beta_hat, std::uint64_t seed);

/// Seed of the independent test sample paired with a training seed.
inline std::uint64_t test_sample_seed(std::uint64_t training_seed) {
  return training_seed ^ 0x7E57'5A3D'1E00'0000ULL;
}

}  // namespace cds
