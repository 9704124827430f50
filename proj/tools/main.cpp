// Command-line front end: model fits on CSV data, the simulation drivers and
// the design diagnostics. Every run writes manifest.json next to its outputs.

#include "cds/csv.hpp"
#include "cds/diagnostics.hpp"
#include "cds/experiments.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string config;
  std::string data;
  std::string out = ".";
  int workers = 1;
  std::optional<std::uint64_t> seed;
  bool paper_scale = false;
  Eigen::Index s = 2;
  std::uint64_t budget = cds::kDefaultEnumerationBudget;
};

int exit_code(cds::ErrorCode code) {
  switch (code) {
    case cds::ErrorCode::config_error:
    case cds::ErrorCode::invalid_argument:
    case cds::ErrorCode::budget_exceeded:
      return 2;
    case cds::ErrorCode::parse_error:
    case cds::ErrorCode::dimension_mismatch:
    case cds::ErrorCode::degenerate_input:
      return 3;
    case cds::ErrorCode::numerical_failure:
      return 4;
  }
  return 4;
}

std::string read_file(const std::string& path, cds::ErrorCode code) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cds::Error(code, "cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

class Outputs {
 public:
  explicit Outputs(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw cds::Error(cds::ErrorCode::config_error, "cannot create output directory '" + dir + "'");
  }

  template <typename Writer>
  void write(const std::string& name, Writer&& writer) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw cds::Error(cds::ErrorCode::config_error, "cannot write '" + (dir_ / name).string() + "'");
    writer(out);
    if (name != "manifest.json") names_.push_back(name);
  }

  void manifest(const std::string& command, const std::string& config_json, std::uint64_t seed,
                std::vector<std::string> warnings = {}) {
    cds::RunManifest m{command, config_json, seed, names_, std::move(warnings)};
    write("manifest.json", [&](std::ostream& o) { cds::write_manifest(o, m); });
  }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

std::string column_name(const cds::CsvDataset& data, Eigen::Index j) {
  const auto k = static_cast<std::size_t>(j);
  return k < data.predictor_names.size() ? data.predictor_names[k] : "x" + std::to_string(j + 1);
}

// Coefficients on the stored (rescaled) scale and on the raw covariate scale.
void write_coefficients(std::ostream& out, const cds::SparseEstimate& est, const cds::RegressionProblem& problem,
                        const cds::CsvDataset& data, double offset) {
  const auto& d = problem.design();
  double intercept = offset;
  for (auto j : est.support) intercept -= d.centers()(j) * d.scales()(j) * est.beta(j);
  out << "index,name,coefficient,raw_coefficient\n";
  out << "-1,(intercept)," << cds::format_number(offset) << ',' << cds::format_number(intercept) << '\n';
  for (auto j : est.support) {
    out << j << ',' << column_name(data, j) << ',' << cds::format_number(est.beta(j)) << ','
        << cds::format_number(est.beta(j) * d.scales()(j)) << '\n';
  }
}

json estimate_json(const cds::SparseEstimate& est) {
  json j;
  j["support_size"] = est.size();
  j["support"] = est.support;
  j["l1_norm"] = est.l1_norm;
  j["converged"] = est.converged;
  j["iterations"] = est.iterations;
  j["feasibility_residual"] = est.feasibility_residual;
  return j;
}

struct ModelRun {
  cds::ModelConfig config;
  cds::CsvDataset data;
  cds::RegressionProblem problem;
  double offset;
};

ModelRun load_model_run(const Options& o) {
  cds::ModelConfig config = cds::parse_model_config(read_file(o.config, cds::ErrorCode::config_error));
  if (o.seed) config.seed = o.seed;
  cds::CsvDataset data = cds::split_response(cds::read_csv_file(o.data), config.response_column);
  double offset = 0.0;
  cds::RegressionProblem problem = cds::problem_from_data(data, config.center, &offset);
  return ModelRun{config, std::move(data), std::move(problem), offset};
}

void run_fit(const Options& o) {
  const ModelRun run = load_model_run(o);
  const cds::SparseEstimate est = cds::fit_model(run.problem, run.config);
  Outputs out(o.out);
  out.write("coefficients.csv", [&](std::ostream& s) { write_coefficients(s, est, run.problem, run.data, run.offset); });
  json report = estimate_json(est);
  report["method"] = cds::to_string(run.config.method);
  report["lambda1"] = run.config.lambda1;
  out.write("fit.json", [&](std::ostream& s) { s << report.dump(2) << '\n'; });
  std::vector<std::string> warnings;
  if (!est.converged) warnings.push_back("the fit did not converge");
  out.manifest("fit", cds::canonical_json(run.config), run.config.seed.value_or(0), warnings);
}

void run_path(const Options& o) {
  const ModelRun run = load_model_run(o);
  const cds::SolutionPath path = cds::fit_model_path(run.problem, run.config);
  Outputs out(o.out);
  out.write("path.csv", [&](std::ostream& s) {
    s << "lambda1,support_size,l1_norm,converged,feasibility_residual\n";
    for (const auto& e : path.entries()) {
      s << cds::format_number(e.lambda1) << ',' << e.estimate.size() << ',' << cds::format_number(e.estimate.l1_norm)
        << ',' << (e.estimate.converged ? 1 : 0) << ',' << cds::format_number(e.estimate.feasibility_residual) << '\n';
    }
  });
  out.write("path_coefficients.csv", [&](std::ostream& s) {
    s << "lambda1,index,name,coefficient\n";
    for (const auto& e : path.entries()) {
      for (auto j : e.estimate.support) {
        s << cds::format_number(e.lambda1) << ',' << j << ',' << column_name(run.data, j) << ','
          << cds::format_number(e.estimate.beta(j)) << '\n';
      }
    }
  });
  json report;
  report["method"] = cds::to_string(run.config.method);
  report["entries"] = path.size();
  report["stopped_early"] = path.stopped_early();
  report["stop_reason"] = cds::to_string(path.stop_reason());
  report["skipped_lambda1"] = path.skipped();
  out.write("path.json", [&](std::ostream& s) { s << report.dump(2) << '\n'; });
  std::vector<std::string> warnings;
  if (!path.skipped().empty()) {
    warnings.push_back(std::to_string(path.skipped().size()) + " grid values did not converge and were skipped");
  }
  out.manifest("path", cds::canonical_json(run.config), run.config.seed.value_or(0), warnings);
}

void run_cv(const Options& o) {
  const ModelRun run = load_model_run(o);
  if (!run.config.seed) throw cds::Error(cds::ErrorCode::config_error, "config field 'seed': required by cv");
  const cds::MethodSettings settings = cds::resolve_settings(run.config, run.problem.n(), run.problem.p());
  const cds::MethodCv result = cds::cross_validate_method(run.config.method, run.problem, settings, *run.config.seed);
  Outputs out(o.out);
  out.write("cv.csv", [&](std::ostream& s) {
    s << "lambda1,mean_mse,se,inherited_folds\n";
    for (const auto& pt : result.cv.cv_errors) {
      s << cds::format_number(pt.lambda1) << ',' << cds::format_number(pt.mean_mse) << ','
        << cds::format_number(pt.se) << ',' << pt.inherited_folds << '\n';
    }
  });
  out.write("coefficients.csv",
            [&](std::ostream& s) { write_coefficients(s, result.estimate, run.problem, run.data, run.offset); });
  json report = estimate_json(result.estimate);
  report["method"] = cds::to_string(run.config.method);
  report["chosen_lambda1"] = result.cv.chosen_lambda1;
  const bool at_head = result.cv.status == cds::CvStatus::all_folds_stopped_at_head;
  report["status"] = at_head ? "all_folds_stopped_at_head" : "ok";
  out.write("cv.json", [&](std::ostream& s) { s << report.dump(2) << '\n'; });
  std::vector<std::string> warnings;
  if (at_head) warnings.push_back("every fold stopped at the head of the path; lambda_max was chosen");
  out.manifest("cv", cds::canonical_json(run.config), *run.config.seed, warnings);
}

void run_sim1(const Options& o) {
  cds::Example1Config c = cds::parse_example1_config(read_file(o.config, cds::ErrorCode::config_error));
  if (o.seed) c.seed = *o.seed;
  if (o.paper_scale) c.replications = 100;
  const auto rows = cds::run_example1(c, o.workers);
  Outputs out(o.out);
  out.write("recovery.csv", [&](std::ostream& s) { cds::write_recovery_csv(s, rows); });
  out.manifest("sim1", cds::canonical_json(c), c.seed);
}

void run_sim2(const Options& o) {
  cds::Example2Config c = cds::parse_example2_config(read_file(o.config, cds::ErrorCode::config_error));
  if (o.seed) c.seed = *o.seed;
  if (o.paper_scale) {
    c.p_values = {1000, 5000, 10000};
    c.replications = 100;
  }
  const auto result = cds::run_example2(c, o.workers);
  Outputs out(o.out);
  out.write("measures.csv", [&](std::ostream& s) { cds::write_measures_csv(s, result.summary); });
  out.write("replications.csv", [&](std::ostream& s) { cds::write_replications_csv(s, result.records); });
  out.manifest("sim2", cds::canonical_json(c), c.seed, result.warnings);
}

void run_robust(const Options& o) {
  cds::RobustnessConfig c = cds::parse_robustness_config(read_file(o.config, cds::ErrorCode::config_error));
  if (o.seed) c.seed = *o.seed;
  if (o.paper_scale) c.replications = 100;
  const auto cells = cds::run_robustness(c, o.workers);
  Outputs out(o.out);
  out.write("robustness.csv", [&](std::ostream& s) { cds::write_robustness_csv(s, cells); });
  out.manifest("robust", cds::canonical_json(c), c.seed);
}

void run_split(const Options& o) {
  cds::SplitEvalConfig c = cds::parse_split_eval_config(read_file(o.config, cds::ErrorCode::config_error));
  if (o.seed) c.seed = *o.seed;
  const cds::CsvDataset data = cds::split_response(cds::read_csv_file(o.data), c.response_column);
  const auto result = cds::run_split_eval(data, c, o.workers);
  Outputs out(o.out);
  out.write("split_eval.csv", [&](std::ostream& s) { cds::write_split_eval_csv(s, result.rows); });
  out.write("split_records.csv", [&](std::ostream& s) { cds::write_split_records_csv(s, result.records); });
  out.manifest("split-eval", cds::canonical_json(c), c.seed);
}

void run_diag(const Options& o) {
  const cds::CsvTable table = cds::read_csv_file(o.data);
  const cds::DesignMatrix x = cds::rescale_columns(cds::DesignMatrix(table.values));
  const cds::UupReport r = cds::uup_report(x, o.s, o.budget);
  json report;
  report["s"] = r.s;
  report["delta_s"] = r.delta_s;
  report["theta_s_2s"] = r.theta_s_2s;
  report["uup_holds"] = r.uup_holds;
  report["subsets_examined"] = r.subsets_examined;
  report["n"] = x.n();
  report["p"] = x.p();
  Outputs out(o.out);
  out.write("diag.json", [&](std::ostream& s) { s << report.dump(2) << '\n'; });
  json config;
  config["s"] = o.s;
  config["budget"] = o.budget;
  out.manifest("diag", config.dump(), 0);
  std::cout << report.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained Dantzig selector: fits, simulations and design diagnostics"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&o](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("-c,--config", o.config, "JSON configuration file")->check(CLI::ExistingFile);
    if (needs_config) opt->required();
    sub->add_option("-o,--out", o.out, "output directory")->capture_default_str();
    sub->add_option("-w,--workers", o.workers, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--seed", o.seed, "override the configured seed");
  };
  auto add_data = [&o](CLI::App* sub, const char* help) {
    sub->add_option("-d,--data", o.data, help)->required()->check(CLI::ExistingFile);
  };

  auto* fit = app.add_subcommand("fit", "fit one method at a single lambda1 on a CSV dataset");
  add_common(fit, true);
  add_data(fit, "CSV with predictors and response");
  auto* path = app.add_subcommand("path", "solution path over a decreasing lambda1 grid");
  add_common(path, true);
  add_data(path, "CSV with predictors and response");
  auto* cv = app.add_subcommand("cv", "K-fold cross-validation of one method");
  add_common(cv, true);
  add_data(cv, "CSV with predictors and response");
  auto* sim1 = app.add_subcommand("sim1", "sparse recovery probabilities (noiseless equicorrelated design)");
  add_common(sim1, true);
  sim1->add_flag("--paper-scale", o.paper_scale, "100 replications");
  auto* sim2 = app.add_subcommand("sim2", "prediction and estimation comparison (AR(1) design)");
  add_common(sim2, true);
  sim2->add_flag("--paper-scale", o.paper_scale, "p in {1000, 5000, 10000} with 100 replications");
  auto* robust = app.add_subcommand("robust", "prediction error over a (lambda0, lambda) grid");
  add_common(robust, true);
  robust->add_flag("--paper-scale", o.paper_scale, "100 replications");
  auto* split = app.add_subcommand("split-eval", "repeated random train/test splits of a CSV dataset");
  add_common(split, true);
  add_data(split, "CSV with predictors and response");
  auto* diag = app.add_subcommand("diag", "restricted isometry and orthogonality constants of a design");
  diag->add_option("-d,--data,--matrix", o.data, "CSV design matrix (every column a predictor)")
      ->required()
      ->check(CLI::ExistingFile);
  diag->add_option("-s", o.s, "sparsity level")->check(CLI::PositiveNumber)->capture_default_str();
  diag->add_option("--budget", o.budget, "maximum number of enumerated subsets")->capture_default_str();
  diag->add_option("-o,--out", o.out, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*fit) run_fit(o);
    else if (*path) run_path(o);
    else if (*cv) run_cv(o);
    else if (*sim1) run_sim1(o);
    else if (*sim2) run_sim2(o);
    else if (*robust) run_robust(o);
    else if (*split) run_split(o);
    else if (*diag) run_diag(o);
  } catch (const cds::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
