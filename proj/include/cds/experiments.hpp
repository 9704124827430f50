#pragma once

#include "cds/core_types.hpp"
#include "cds/csv.hpp"
#include "cds/metrics.hpp"
#include "cds/tuning.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cds {

enum class Method { ds, tds, lasso, enet, alasso, cds, oracle };

/// "DS", "TDS", "Lasso", "Enet", "ALasso", "CDS", "Oracle".
const char* to_string(Method method);
Method parse_method(const std::string& name);

/// Shared tuning knobs of the comparison methods.
struct TuningSettings {
  int folds = 5;
  int grid_length = 50;
  double grid_floor_ratio = 0.05;
  double enet_alpha = 0.5;
};

struct MethodSettings {
  double lambda0 = 0.01;
  double lambda = 0.2;
  /// Hard threshold of the thresholded Dantzig selector; <= 0 means lambda.
  double tds_threshold = 0.0;
  TuningSettings tuning;

  double tds_tau() const { return tds_threshold > 0.0 ? tds_threshold : lambda; }
};

struct MethodCv {
  CvResult cv;  // empty for the oracle
  SparseEstimate estimate;
};

/// One method tuned by K-fold cross-validation on `problem` (the oracle needs
/// no tuning). `cv_seed` fixes the fold assignment.
MethodCv cross_validate_method(Method method, const RegressionProblem& problem,
                               const MethodSettings& settings, std::uint64_t cv_seed);

/// cross_validate_method(...).estimate
SparseEstimate fit_method_cv(Method method, const RegressionProblem& problem,
                             const MethodSettings& settings, std::uint64_t cv_seed);

/// Seed of the fold assignment used for a dataset generated from `data_seed`.
std::uint64_t cv_seed_for(std::uint64_t data_seed);

/// Deterministic seed for dataset `replication` of experiment cell `cell`.
std::uint64_t dataset_seed(std::uint64_t base, std::uint64_t cell, std::uint64_t replication);

// ---------------------------------------------------------------------------
// Sparse recovery (noiseless, equicorrelated design).

struct Example1Config {
  std::vector<Index> n_values;
  std::vector<double> r_values;
  Index p = 1000;
  int replications = 30;
  std::vector<Method> methods;
  std::vector<double> lambda0_grid{0.001, 0.005, 0.01, 0.05, 0.1};
  std::vector<double> lambda_grid{0.05, 0.1, 0.15, 0.2};
  TuningSettings tuning;
  std::uint64_t seed = 0;
};

struct RecoveryRow {
  std::string method;
  Index n = 0;
  double r = 0.0;
  double recovery_probability = 0.0;
  int replications = 0;
  std::uint64_t seed = 0;
};

/// True iff some solution on the method's path has exactly the true support.
/// CDS succeeds if any (lambda0, lambda) pair does; TDS if any threshold in
/// lambda_grid does.
bool recovers_support(Method method, const RegressionProblem& problem, const Example1Config& config,
                      std::uint64_t cv_seed);

std::vector<RecoveryRow> run_example1(const Example1Config& config, int workers);

// ---------------------------------------------------------------------------
// Prediction and estimation comparison (AR(1) design, strong and weak signals).

struct Example2Config {
  Index n = 100;
  std::vector<Index> p_values{1000};
  double sigma = 0.4;
  double rho = 0.5;
  int replications = 20;
  std::vector<Method> methods;
  double lambda0 = 0.01;
  double lambda = 0.2;
  double tds_threshold = 0.0;
  Index test_size = 10000;
  double strong_threshold = 0.3;
  TuningSettings tuning;
  std::uint64_t seed = 0;
};

struct ReplicationRecord {
  int replication = 0;
  Index p = 0;
  std::string method;
  double pe = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  Index fp = 0;
  Index fn_strong = 0;
  Index fn_weak = 0;
};

struct MeasureRow {
  std::string method;
  Index p = 0;
  MeanSe pe;
  MeanSe l1;
  MeanSe l2;
  MeanSe linf;
  MeanSe fp;
  MeanSe fn_strong;
  MeanSe fn_weak;
  int replications = 0;
};

struct Example2Result {
  std::vector<MeasureRow> summary;
  std::vector<ReplicationRecord> records;
  /// Replications where the oracle's PE exceeded another method's.
  std::vector<std::string> warnings;
};

Example2Result run_example2(const Example2Config& config, int workers);

// ---------------------------------------------------------------------------
// Sensitivity of the constrained Dantzig selector to (lambda0, lambda).

struct RobustnessConfig {
  Index n = 100;
  Index p = 1000;
  double sigma = 0.4;
  double rho = 0.5;
  int replications = 10;
  std::vector<double> lambda0_grid{0.001, 0.005, 0.01, 0.015, 0.02, 0.025, 0.03};
  std::vector<double> lambda_grid{0.1, 0.15, 0.2, 0.25, 0.3, 0.35};
  Index test_size = 10000;
  TuningSettings tuning;
  std::uint64_t seed = 0;
};

struct RobustnessCell {
  double lambda0 = 0.0;
  double lambda = 0.0;
  MeanSe pe;
  int replications = 0;
};

/// Cells in lambda0-major order. Every cell sees the same datasets.
std::vector<RobustnessCell> run_robustness(const RobustnessConfig& config, int workers);

// ---------------------------------------------------------------------------
// Repeated random train/test splits of a user dataset.

struct SplitEvalConfig {
  Index train_size = 0;
  int splits = 100;
  std::vector<Method> methods;
  std::optional<std::string> response_column;
  bool center = true;
  /// <= 0 selects sqrt(log p / n_train) and 0.05 of it.
  double lambda0 = 0.0;
  double lambda = 0.0;
  double tds_threshold = 0.0;
  TuningSettings tuning;
  std::uint64_t seed = 0;
};

struct SplitRecord {
  int split = 0;
  std::string method;
  double pe = 0.0;
  Index model_size = 0;
};

struct SplitMethodRow {
  std::string method;
  MeanSe pe;
  double median_model_size = 0.0;
  /// Two-sided paired t-test of CDS against this method (NaN without CDS).
  double p_value_vs_cds = 0.0;
  bool zero_variance = false;
  int splits = 0;
};

struct SplitEvalResult {
  std::vector<SplitMethodRow> rows;
  std::vector<SplitRecord> records;
};

SplitEvalResult run_split_eval(const CsvDataset& data, const SplitEvalConfig& config, int workers);

// ---------------------------------------------------------------------------
// Single fits on a user dataset (fit, path and cv subcommands).

struct ModelConfig {
  Method method = Method::cds;
  std::optional<std::string> response_column;
  bool center = true;
  /// Constraint level of fit; ignored by path and cv.
  double lambda1 = 0.0;
  /// Explicit decreasing grid for path; empty means the default log grid.
  std::vector<double> lambda1_grid;
  /// <= 0 selects sqrt(log p / n) and 0.05 of it.
  double lambda0 = 0.0;
  double lambda = 0.0;
  double tds_threshold = 0.0;
  TuningSettings tuning;
  /// Required by cv and by ALasso (whose initial estimate is cross-validated).
  std::optional<std::uint64_t> seed;
};

/// Method settings with the heuristic (lambda0, lambda) filled in for n x p.
MethodSettings resolve_settings(const ModelConfig& config, Index n, Index p);

/// Column-rescaled (and optionally centered) problem built from raw data.
/// `offset` receives the response mean removed by centering.
RegressionProblem problem_from_data(const CsvDataset& data, bool center, double* offset);

SparseEstimate fit_model(const RegressionProblem& problem, const ModelConfig& config);
SolutionPath fit_model_path(const RegressionProblem& problem, const ModelConfig& config);

// ---------------------------------------------------------------------------
// Configuration files (JSON). Unknown fields, wrong types and out-of-range
// values raise Error(config_error) naming the field; malformed JSON reports
// the line and column.

Example1Config parse_example1_config(const std::string& json_text);
Example2Config parse_example2_config(const std::string& json_text);
RobustnessConfig parse_robustness_config(const std::string& json_text);
SplitEvalConfig parse_split_eval_config(const std::string& json_text);
ModelConfig parse_model_config(const std::string& json_text);

/// Canonical JSON (sorted keys, resolved defaults) of a configuration.
std::string canonical_json(const Example1Config& config);
std::string canonical_json(const Example2Config& config);
std::string canonical_json(const RobustnessConfig& config);
std::string canonical_json(const SplitEvalConfig& config);
std::string canonical_json(const ModelConfig& config);

// ---------------------------------------------------------------------------
// Output tables. Column order is fixed; numbers use %.12g.

std::string format_number(double value);

void write_recovery_csv(std::ostream& out, const std::vector<RecoveryRow>& rows);
void write_measures_csv(std::ostream& out, const std::vector<MeasureRow>& rows);
void write_replications_csv(std::ostream& out, const std::vector<ReplicationRecord>& records);
void write_robustness_csv(std::ostream& out, const std::vector<RobustnessCell>& cells);
void write_split_eval_csv(std::ostream& out, const std::vector<SplitMethodRow>& rows);
void write_split_records_csv(std::ostream& out, const std::vector<SplitRecord>& records);

std::uint64_t fnv1a64(std::string_view text);

struct RunManifest {
  std::string command;
  std::string config_json;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
};

/// {command, config, config_hash, seed, software_version, outputs, warnings}
void write_manifest(std::ostream& out, const RunManifest& manifest);

/// Runs task(i) for i in [0, count) on up to `workers` threads. Results are
/// whatever the tasks store by index, so output order never depends on
/// scheduling. The first exception is rethrown after all workers stop.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task);

}  // namespace cds
