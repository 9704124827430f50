#include "cds/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cds;

namespace {

// Two-sided Student-t tail by Simpson integration of the density.
double t_two_sided(double t, double nu) {
  const double c = std::exp(std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2)) / std::sqrt(nu * M_PI);
  auto f = [&](double x) { return c * std::pow(1 + x * x / nu, -(nu + 1) / 2); };
  const double a = std::abs(t);
  const int m = 200000;
  const double h = a / m;
  double s = f(0) + f(a);
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4 : 2) * f(i * h);
  return 1.0 - 2.0 * s * h / 3.0;
}

}  // namespace

TEST(Losses, HandNorms) {
  Vector b0(2), bh(2);
  b0 << 1.0, 1.0;
  bh << 4.0, -3.0;
  const EstimationLosses l = estimation_losses(bh, b0);
  EXPECT_DOUBLE_EQ(l.l1, 7.0);
  EXPECT_DOUBLE_EQ(l.l2, 5.0);
  EXPECT_DOUBLE_EQ(l.linf, 4.0);
  const EstimationLosses z = estimation_losses(b0, b0);
  EXPECT_EQ(z.l1 + z.l2 + z.linf, 0.0);
  EXPECT_THROW(estimation_losses(Vector::Zero(3), b0), Error);
}

TEST(Selection, StrongWeakSplit) {
  Vector b0 = Vector::Zero(40);
  const double v[] = {0.6, 0, 0, -0.6, 0, 0, 0.05, 0, 0, -0.05, 0, 0};
  for (int j = 0; j < 36; ++j) b0(j) = v[j % 12];
  const TrueModel truth(b0, 0.4);
  Vector strong_only = b0;
  for (int j = 0; j < 36; ++j) {
    if (std::abs(b0(j)) < 0.3) strong_only(j) = 0.0;
  }
  SelectionErrors e = fp_fn_counts(strong_only, truth);
  EXPECT_EQ(e.fp, 0);
  EXPECT_EQ(e.fn_strong, 0);
  EXPECT_EQ(e.fn_weak, 6);
  e = fp_fn_counts(b0, truth);
  EXPECT_EQ(e.fp + e.fn_strong + e.fn_weak, 0);
  Vector noisy = b0;
  noisy(39) = 0.1;
  EXPECT_EQ(fp_fn_counts(noisy, truth).fp, 1);
}

TEST(Selection, CountIdentities) {
  Vector b0 = Vector::Zero(10);
  b0 << 1, 0.1, 0, 0, -2, 0, 0.2, 0, 0, 0;
  const TrueModel truth(b0, 1.0);
  Vector bh(10);
  bh << 0.5, 0, 0.3, 0, -1, 0, 0, 0.7, 0, 0;
  const SelectionErrors e = fp_fn_counts(bh, truth);
  const Index hit = 2;  // columns 0 and 4
  EXPECT_EQ(e.fp + hit, 4);
  EXPECT_EQ(e.fn_strong + e.fn_weak + hit, truth.s);
}

TEST(Recovery, ExactSupportAnywhereOnPath) {
  Vector b0 = Vector::Zero(5);
  b0 << 1, 0, -1, 0, 0;
  const TrueModel truth(b0, 0.0);
  SolutionPath path;
  path.append(1.0, SparseEstimate::zeros(5));
  EXPECT_FALSE(exact_recovery(path, truth));
  Vector superset = b0;
  superset(4) = 0.2;
  path.append(0.5, SparseEstimate::from_beta(superset));
  EXPECT_FALSE(exact_recovery(path, truth));
  path.append(0.2, SparseEstimate::from_beta(3.0 * b0));
  EXPECT_TRUE(exact_recovery(path, truth));
}

TEST(Aggregate, MeanAndStandardError) {
  const MeanSe m = mean_se({1, 2, 3});
  EXPECT_DOUBLE_EQ(m.mean, 2.0);
  EXPECT_NEAR(m.se, 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_EQ(mean_se({4, 4, 4, 4}).se, 0.0);
  EXPECT_THROW(mean_se({1}), Error);
  const auto agg = aggregate_replications({{{"pe", 1.0}, {"fp", 0.0}}, {{"pe", 3.0}, {"fp", 2.0}}});
  EXPECT_DOUBLE_EQ(agg.at("pe").mean, 2.0);
  EXPECT_DOUBLE_EQ(agg.at("fp").se, 1.0);
  EXPECT_THROW(aggregate_replications({{{"pe", 1.0}}}), Error);
  EXPECT_THROW(aggregate_replications({{{"pe", 1.0}}, {{"l1", 1.0}}}), Error);
}

TEST(PairedT, MatchesIntegratedDensity) {
  const std::vector<double> a{0.21, 0.25, 0.19, 0.30, 0.27, 0.22, 0.24};
  const std::vector<double> b{0.20, 0.21, 0.18, 0.26, 0.27, 0.19, 0.25};
  const PairedTTest t = paired_t_test(a, b);
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i) d.push_back(a[i] - b[i]);
  const MeanSe m = mean_se(d);
  EXPECT_NEAR(t.t, m.mean / m.se, 1e-12);
  EXPECT_NEAR(t.p_value, t_two_sided(t.t, 6.0), 1e-8);
  EXPECT_FALSE(t.zero_variance);
}

TEST(PairedT, SelfComparisonAndConstantShift) {
  const std::vector<double> a{1.0, 2.0, 5.0};
  const PairedTTest self = paired_t_test(a, a);
  EXPECT_EQ(self.p_value, 1.0);
  EXPECT_TRUE(self.zero_variance);
  const PairedTTest shifted = paired_t_test({2.0, 3.0, 6.0}, a);
  EXPECT_TRUE(shifted.zero_variance);
  EXPECT_EQ(shifted.p_value, 0.0);
  EXPECT_THROW(paired_t_test({1.0}, {1.0}), Error);
}
