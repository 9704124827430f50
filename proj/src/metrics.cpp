#include "cds/metrics.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>

namespace cds {

EstimationLosses estimation_losses(const Vector& beta_hat, const Vector& beta0) {
  if (beta_hat.size() != beta0.size()) throw Error(ErrorCode::dimension_mismatch, "length mismatch");
  const Vector diff = beta_hat - beta0;
  if (diff.size() == 0) return {};
  return {diff.lpNorm<1>(), diff.norm(), diff.lpNorm<Eigen::Infinity>()};
}

SelectionErrors fp_fn_counts(const Vector& beta_hat, const TrueModel& truth, double strong_threshold) {
  if (beta_hat.size() != truth.beta0.size()) throw Error(ErrorCode::dimension_mismatch, "length mismatch");
  SelectionErrors e;
  for (Index j = 0; j < beta_hat.size(); ++j) {
    const bool selected = beta_hat(j) != 0.0;
    const double b0 = truth.beta0(j);
    if (b0 == 0.0) {
      e.fp += selected;
    } else if (!selected) {
      (std::abs(b0) >= strong_threshold ? e.fn_strong : e.fn_weak) += 1;
    }
  }
  return e;
}

bool exact_recovery(const SolutionPath& path, const TrueModel& truth) {
  return std::any_of(path.entries().begin(), path.entries().end(),
                     [&](const PathEntry& e) { return e.estimate.support == truth.support; });
}

MeanSe mean_se(const std::vector<double>& values) {
  if (values.size() < 2) throw Error(ErrorCode::invalid_argument, "need at least 2 replications");
  const double r = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / r;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (r - 1.0)) / std::sqrt(r)};
}

std::map<std::string, MeanSe> aggregate_replications(const std::vector<MeasureRecord>& records) {
  if (records.size() < 2) throw Error(ErrorCode::invalid_argument, "need at least 2 replications");
  std::map<std::string, MeanSe> out;
  for (const auto& [name, unused] : records.front()) {
    std::vector<double> column;
    column.reserve(records.size());
    for (const auto& rec : records) {
      const auto it = rec.find(name);
      if (it == rec.end()) throw Error(ErrorCode::invalid_argument, "replication lacks measure " + name);
      column.push_back(it->second);
    }
    out[name] = mean_se(column);
  }
  return out;
}

PairedTTest paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::dimension_mismatch, "paired samples differ in length");
  if (a.size() < 2) throw Error(ErrorCode::invalid_argument, "paired t-test needs at least 2 pairs");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const MeanSe m = mean_se(d);
  PairedTTest out;
  if (!(m.se > 0.0)) {
    out.zero_variance = true;
    out.t = 0.0;
    out.p_value = m.mean == 0.0 ? 1.0 : 0.0;
    return out;
  }
  out.t = m.mean / m.se;
  const boost::math::students_t dist(static_cast<double>(a.size() - 1));
  out.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(out.t)));
  return out;
}

}  // namespace cds
