#include "cds/datagen.hpp"

#include <algorithm>
#include <cmath>

namespace cds {

const char* to_string(DesignKind kind) {
  return kind == DesignKind::equicorrelated ? "equicorrelated" : "ar1";
}

void SimDesign::validate() const {
  if (n < 1 || p < 1) throw Error(ErrorCode::invalid_argument, "design needs n >= 1 and p >= 1");
  if (!(correlation >= 0.0 && correlation < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "correlation must lie in [0, 1)");
  }
  if (truth.beta0.size() != p) {
    throw Error(ErrorCode::dimension_mismatch, "true coefficient length differs from p");
  }
}

Matrix draw_raw_rows(const SimDesign& design, Index rows, Rng& rng) {
  const Index p = design.p;
  const double c = design.correlation;
  Matrix x(rows, p);
  if (design.kind == DesignKind::equicorrelated) {
    const double a = std::sqrt(c);
    const double b = std::sqrt(1.0 - c);
    for (Index i = 0; i < rows; ++i) {
      const double z = rng.normal();
      for (Index j = 0; j < p; ++j) x(i, j) = a * z + b * rng.normal();
    }
  } else {
    const double b = std::sqrt(1.0 - c * c);
    for (Index i = 0; i < rows; ++i) {
      double prev = rng.normal();
      x(i, 0) = prev;
      for (Index j = 1; j < p; ++j) {
        prev = c * prev + b * rng.normal();
        x(i, j) = prev;
      }
    }
  }
  return x;
}

namespace {

RegressionProblem generate_checked(const SimDesign& design, DesignKind expected) {
  design.validate();
  if (design.kind != expected) {
    throw Error(ErrorCode::invalid_argument, "design kind does not match the generator");
  }
  Rng rng(design.seed);
  DesignMatrix x = rescale_columns(DesignMatrix(draw_raw_rows(design, design.n, rng)));
  Vector y = x.values() * design.truth.beta0;
  if (!design.noiseless) {
    for (Index i = 0; i < design.n; ++i) y(i) += design.truth.sigma * rng.normal();
  }
  return RegressionProblem(std::move(x), std::move(y), design.truth);
}

}  // namespace

RegressionProblem generate_equicorrelated(const SimDesign& design) {
  return generate_checked(design, DesignKind::equicorrelated);
}

RegressionProblem generate_ar1(const SimDesign& design) {
  return generate_checked(design, DesignKind::ar1);
}

RegressionProblem generate(const SimDesign& design) {
  return design.kind == DesignKind::equicorrelated ? generate_equicorrelated(design)
                                                   : generate_ar1(design);
}

Matrix population_covariance(DesignKind kind, Index p, double correlation) {
  Matrix cov(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) {
      if (i == j) {
        cov(i, j) = 1.0;
      } else if (kind == DesignKind::equicorrelated) {
        cov(i, j) = correlation;
      } else {
        cov(i, j) = std::pow(correlation, static_cast<double>(std::abs(i - j)));
      }
    }
  }
  return cov;
}

Vector sparse_recovery_beta(Index p) {
  static constexpr double kNonzero[] = {1.0, -0.5, 0.7, -1.2, -0.9, 0.3, 0.55};
  if (p < 7) throw Error(ErrorCode::invalid_argument, "sparse recovery truth needs p >= 7");
  Vector beta = Vector::Zero(p);
  for (Index j = 0; j < 7; ++j) beta(j) = kNonzero[j];
  return beta;
}

Vector strong_weak_beta(Index p) {
  static constexpr double kPattern[] = {0.6, 0, 0, -0.6, 0, 0, 0.05, 0, 0, -0.05, 0, 0};
  if (p < 36) throw Error(ErrorCode::invalid_argument, "strong/weak truth needs p >= 36");
  Vector beta = Vector::Zero(p);
  for (Index rep = 0; rep < 3; ++rep) {
    for (Index j = 0; j < 12; ++j) beta(12 * rep + j) = kPattern[j];
  }
  return beta;
}

std::vector<double> prediction_errors(const SimDesign& design, const DesignMatrix& training,
                                      Index size, std::uint64_t seed,
                                      const std::vector<Vector>& betas) {
  design.validate();
  if (size < 1) throw Error(ErrorCode::invalid_argument, "test sample size must be positive");
  if (training.p() != design.p || training.scales().size() != design.p) {
    throw Error(ErrorCode::dimension_mismatch, "training scale factors do not match the design");
  }
  for (const auto& b : betas) {
    if (b.size() != design.p) throw Error(ErrorCode::dimension_mismatch, "estimate length differs from p");
  }
  Rng rng(seed);
  constexpr Index kChunk = 1000;
  std::vector<double> sse(betas.size(), 0.0);
  const double sigma = design.noiseless ? 0.0 : design.truth.sigma;
  for (Index done = 0; done < size; done += kChunk) {
    const Index rows = std::min(kChunk, size - done);
    const Matrix x = training.transform_raw(draw_raw_rows(design, rows, rng));
    Vector y = x * design.truth.beta0;
    for (Index i = 0; i < rows; ++i) y(i) += sigma * rng.normal();
    for (std::size_t b = 0; b < betas.size(); ++b) {
      sse[b] += (y - x * betas[b]).squaredNorm();
    }
  }
  for (auto& v : sse) v /= static_cast<double>(size);
  return sse;
}

double make_test_sample(const SimDesign& design, const DesignMatrix& training, Index size,
                        const Vector& beta_hat, std::uint64_t seed) {
  return prediction_errors(design, training, size, seed, {beta_hat}).front();
}

}  // namespace cds
