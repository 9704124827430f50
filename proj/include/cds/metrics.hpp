#pragma once

#include "cds/core_types.hpp"

#include <map>
#include <string>
#include <vector>

namespace cds {

struct EstimationLosses {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
};

EstimationLosses estimation_losses(const Vector& beta_hat, const Vector& beta0);

struct SelectionErrors {
  Index fp = 0;
  Index fn_strong = 0;
  Index fn_weak = 0;
};

/// False positives and false negatives; a true covariate is "strong" when
/// |beta0_j| >= strong_threshold.
SelectionErrors fp_fn_counts(const Vector& beta_hat, const TrueModel& truth,
                             double strong_threshold = 0.3);

/// True iff some path entry has exactly the true support.
bool exact_recovery(const SolutionPath& path, const TrueModel& truth);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

/// Sample mean and sd / sqrt(R) with the n - 1 standard deviation. R >= 2.
MeanSe mean_se(const std::vector<double>& values);

using MeasureRecord = std::map<std::string, double>;

/// Per-measure mean and SE over replications (every record must carry the
/// same measures).
std::map<std::string, MeanSe> aggregate_replications(const std::vector<MeasureRecord>& records);

struct PairedTTest {
  double t = 0.0;
  double p_value = 1.0;
  bool zero_variance = false;
};

/// Two-sided paired t-test of a - b.
PairedTTest paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace cds
