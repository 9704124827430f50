#include "cds/experiments.hpp"

#include "cds/baselines.hpp"
#include "cds/datagen.hpp"
#include "cds/random.hpp"
#include "cds/selectors.hpp"
#include "cds/tuning.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

namespace cds {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Error config_error(const std::string& message) { return Error(ErrorCode::config_error, message); }

// ---------------------------------------------------------------------------
// Path helpers shared by the drivers.

std::vector<double> dantzig_grid(const RegressionProblem& problem, const TuningSettings& t) {
  return lambda1_grid(problem, t.grid_length, t.grid_floor_ratio);
}

PenaltyConfig penalty_config(const TuningSettings& t) {
  PenaltyConfig pc;
  pc.enet_alpha = t.enet_alpha;
  pc.grid_length = t.grid_length;
  pc.grid_floor_ratio = t.grid_floor_ratio;
  return pc;
}

CdsConfig cds_config(const RegressionProblem& problem, double lambda0, double lambda,
                     const TuningSettings& t) {
  CdsConfig c;
  c.lambda0 = lambda0;
  c.lambda = lambda;
  c.grid_length = t.grid_length;
  c.grid_floor_ratio = t.grid_floor_ratio;
  c.cv_folds = t.folds;
  // lambda0 may not exceed any lambda1, so the grid is cut at lambda0.
  for (double g : dantzig_grid(problem, t)) {
    if (g >= lambda0) c.lambda1_grid.push_back(g);
  }
  return c;
}

SolutionPath thresholded_path(const SolutionPath& path, double tau) {
  SolutionPath out;
  for (const auto& e : path.entries()) out.append(e.lambda1, hard_threshold(e.estimate, tau));
  out.stop(path.stop_reason());
  return out;
}

std::vector<double> path_grid(const SolutionPath& path) {
  std::vector<double> g;
  for (const auto& e : path.entries()) g.push_back(e.lambda1);
  return g;
}

// ---------------------------------------------------------------------------
// JSON configuration reading.

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw config_error("malformed JSON at line " + std::to_string(line) + ", column " +
                       std::to_string(column) + ": " + e.what());
  }
}

class Fields {
 public:
  explicit Fields(const json& j) : j_(j) {
    if (!j.is_object()) throw config_error("configuration must be a JSON object");
  }

  std::uint64_t seed() {
    const json* v = take("seed");
    if (!v) throw config_error("config field 'seed': required (no hidden default for randomness)");
    if (!v->is_number_unsigned()) throw config_error("config field 'seed': expected a nonnegative integer");
    return v->get<std::uint64_t>();
  }

  long long integer(const std::string& key, long long fallback, long long min_value) {
    const json* v = take(key);
    if (!v) return fallback;
    if (!v->is_number_integer() || v->get<long long>() < min_value) {
      throw config_error("config field '" + key + "': expected an integer >= " + std::to_string(min_value));
    }
    return v->get<long long>();
  }

  double number(const std::string& key, double fallback, double lo, double hi, const char* range) {
    const json* v = take(key);
    if (!v) return fallback;
    if (!v->is_number()) throw config_error("config field '" + key + "': expected a number");
    const double x = v->get<double>();
    if (!(x >= lo && x <= hi)) throw config_error("config field '" + key + "': must lie in " + range);
    return x;
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback, double lo,
                              double hi, const char* range) {
    const json* v = take(key);
    if (!v) return fallback;
    if (!v->is_array() || v->empty()) throw config_error("config field '" + key + "': expected a nonempty array");
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number()) throw config_error("config field '" + key + "': entries must be numbers");
      const double x = e.get<double>();
      if (!(x >= lo && x <= hi)) throw config_error("config field '" + key + "': entries must lie in " + range);
      out.push_back(x);
    }
    return out;
  }

  std::vector<Index> integers(const std::string& key, std::vector<Index> fallback, long long min_value) {
    const json* v = take(key);
    if (!v) return fallback;
    if (!v->is_array() || v->empty()) throw config_error("config field '" + key + "': expected a nonempty array");
    std::vector<Index> out;
    for (const auto& e : *v) {
      if (!e.is_number_integer() || e.get<long long>() < min_value) {
        throw config_error("config field '" + key + "': entries must be integers >= " + std::to_string(min_value));
      }
      out.push_back(static_cast<Index>(e.get<long long>()));
    }
    return out;
  }

  std::vector<Method> methods(const std::string& key, std::vector<Method> fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    if (!v->is_array() || v->empty()) throw config_error("config field '" + key + "': expected a nonempty array");
    std::vector<Method> out;
    for (const auto& e : *v) {
      if (!e.is_string()) throw config_error("config field '" + key + "': entries must be method names");
      try {
        out.push_back(parse_method(e.get<std::string>()));
      } catch (const Error& err) {
        throw config_error("config field '" + key + "': " + err.what());
      }
    }
    std::set<Method> unique(out.begin(), out.end());
    if (unique.size() != out.size()) throw config_error("config field '" + key + "': duplicate method");
    return out;
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw config_error("config field '" + key + "': expected true or false");
    return v->get<bool>();
  }

  std::optional<std::string> text(const std::string& key) {
    const json* v = take(key);
    if (!v || v->is_null()) return std::nullopt;
    if (!v->is_string()) throw config_error("config field '" + key + "': expected a string");
    return v->get<std::string>();
  }

  TuningSettings tuning() {
    TuningSettings t;
    t.folds = static_cast<int>(integer("folds", t.folds, 2));
    t.grid_length = static_cast<int>(integer("grid_length", t.grid_length, 2));
    t.grid_floor_ratio = number("grid_floor_ratio", t.grid_floor_ratio, 1e-12, 0.999999, "(0, 1)");
    t.enet_alpha = number("enet_alpha", t.enet_alpha, 1e-12, 1.0, "(0, 1]");
    return t;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw config_error("unknown config field '" + it.key() + "'");
    }
  }

 private:
  const json* take(const std::string& key) {
    used_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& j_;
  std::set<std::string> used_;
};

void require_decreasing_free(const std::vector<double>& grid, const std::string& key) {
  std::set<double> unique(grid.begin(), grid.end());
  if (unique.size() != grid.size()) throw config_error("config field '" + key + "': duplicate values");
}

json methods_json(const std::vector<Method>& methods) {
  json a = json::array();
  for (Method m : methods) a.push_back(to_string(m));
  return a;
}

void add_tuning(json& j, const TuningSettings& t) {
  j["folds"] = t.folds;
  j["grid_length"] = t.grid_length;
  j["grid_floor_ratio"] = t.grid_floor_ratio;
  j["enet_alpha"] = t.enet_alpha;
}

const std::vector<Method> kAllMethods{Method::ds,     Method::tds, Method::lasso, Method::enet,
                                      Method::alasso, Method::cds, Method::oracle};

void write_mean_se(std::ostream& out, const MeanSe& m) {
  out << ',' << format_number(m.mean) << ',' << format_number(m.se);
}

}  // namespace

// ---------------------------------------------------------------------------

const char* to_string(Method method) {
  switch (method) {
    case Method::ds: return "DS";
    case Method::tds: return "TDS";
    case Method::lasso: return "Lasso";
    case Method::enet: return "Enet";
    case Method::alasso: return "ALasso";
    case Method::cds: return "CDS";
    case Method::oracle: return "Oracle";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (Method m : kAllMethods) {
    if (name == to_string(m)) return m;
  }
  throw Error(ErrorCode::invalid_argument,
              "unknown method '" + name + "' (expected DS, TDS, Lasso, Enet, ALasso, CDS or Oracle)");
}

std::uint64_t dataset_seed(std::uint64_t base, std::uint64_t cell, std::uint64_t replication) {
  std::uint64_t state = base ^ (0x9E3779B97F4A7C15ULL * (cell + 1));
  const std::uint64_t cell_base = splitmix64(state);
  return replication_seed(cell_base, replication);
}

std::uint64_t cv_seed_for(std::uint64_t data_seed) {
  std::uint64_t state = data_seed ^ 0xC5F0'1D5E'ED00'0000ULL;
  return splitmix64(state);
}

MethodCv cross_validate_method(Method method, const RegressionProblem& problem,
                               const MethodSettings& settings, std::uint64_t cv_seed) {
  const TuningSettings& t = settings.tuning;
  MethodCv out;
  switch (method) {
    case Method::oracle:
      out.estimate = oracle_fit(problem);
      return out;
    case Method::cds: {
      const CdsConfig c = cds_config(problem, settings.lambda0, settings.lambda, t);
      out.cv = cross_validate_lambda1(problem, c, t.folds, cv_seed);
      out.estimate = cds_path(problem, c).estimate_at(out.cv.chosen_lambda1);
      return out;
    }
    case Method::ds:
    case Method::tds: {
      const std::vector<double> grid = dantzig_grid(problem, t);
      const double tau = settings.tds_tau();
      const bool thresholded = method == Method::tds;
      PathFitter fitter = [thresholded, tau](const RegressionProblem& train, const std::vector<double>& g) {
        SolutionPath path = dantzig_path(train, g);
        return thresholded ? thresholded_path(path, tau) : path;
      };
      out.cv = cross_validate(problem, grid, fitter, t.folds, cv_seed);
      out.estimate = fitter(problem, grid).estimate_at(out.cv.chosen_lambda1);
      return out;
    }
    case Method::lasso:
    case Method::enet: {
      PenaltyConfig pc = penalty_config(t);
      const double alpha = method == Method::lasso ? 1.0 : pc.enet_alpha;
      const double lmax = problem.lambda_max() / alpha;
      if (!(lmax > 0.0)) throw Error(ErrorCode::degenerate_input, "zero response: lambda_max is 0");
      const std::vector<double> grid = log_grid(lmax, t.grid_floor_ratio * lmax, t.grid_length);
      PathFitter fitter = [method, pc](const RegressionProblem& train, const std::vector<double>& g) {
        PenaltyConfig c = pc;
        c.lambda_grid = g;
        return method == Method::lasso ? lasso_path(train, c) : elastic_net_path(train, c);
      };
      out.cv = cross_validate(problem, grid, fitter, t.folds, cv_seed);
      out.estimate = fitter(problem, grid).estimate_at(out.cv.chosen_lambda1);
      return out;
    }
    case Method::alasso: {
      const PenaltyConfig pc = penalty_config(t);
      const AdaptiveLassoPath full = adaptive_lasso_path(problem, pc, t.folds, cv_seed);
      const Vector initial = full.initial;
      PathFitter fitter = [pc, initial](const RegressionProblem& train, const std::vector<double>& g) {
        PenaltyConfig c = pc;
        c.lambda_grid = g;
        return adaptive_lasso_path(train, c, initial).path;
      };
      out.cv = cross_validate(problem, path_grid(full.path), fitter, t.folds, cv_seed);
      out.estimate = full.path.estimate_at(out.cv.chosen_lambda1);
      return out;
    }
  }
  throw Error(ErrorCode::invalid_argument, "unknown method");
}

SparseEstimate fit_method_cv(Method method, const RegressionProblem& problem,
                             const MethodSettings& settings, std::uint64_t cv_seed) {
  return cross_validate_method(method, problem, settings, cv_seed).estimate;
}

// ---------------------------------------------------------------------------

MethodSettings resolve_settings(const ModelConfig& config, Index n, Index p) {
  const CdsConfig h = CdsConfig::heuristic(n, p);
  MethodSettings s;
  s.lambda0 = config.lambda0 > 0.0 ? config.lambda0 : h.lambda0;
  s.lambda = config.lambda > 0.0 ? config.lambda : h.lambda;
  s.tds_threshold = config.tds_threshold;
  s.tuning = config.tuning;
  return s;
}

RegressionProblem problem_from_data(const CsvDataset& data, bool center, double* offset) {
  if (data.x.rows() != data.y.size()) throw Error(ErrorCode::dimension_mismatch, "predictor and response rows differ");
  const double mean = center ? data.y.mean() : 0.0;
  if (offset) *offset = mean;
  return RegressionProblem(rescale_columns(DesignMatrix(data.x), center), (data.y.array() - mean).matrix());
}

namespace {

std::uint64_t required_seed(const ModelConfig& config, const char* why) {
  if (!config.seed) throw config_error(std::string("config field 'seed': required ") + why);
  return *config.seed;
}

}  // namespace

SparseEstimate fit_model(const RegressionProblem& problem, const ModelConfig& config) {
  const double l1 = config.lambda1;
  if (!(l1 > 0.0)) throw config_error("config field 'lambda1': a fit needs lambda1 > 0");
  const MethodSettings s = resolve_settings(config, problem.n(), problem.p());
  switch (config.method) {
    case Method::ds:
      return dantzig_selector(problem, l1);
    case Method::tds:
      return thresholded_dantzig(problem, l1, s.tds_tau());
    case Method::cds: {
      if (l1 < s.lambda0) throw config_error("config field 'lambda1': must be at least lambda0");
      // Walk the default grid down to lambda1 so the fit is warm-started.
      CdsConfig c = cds_config(problem, s.lambda0, s.lambda, s.tuning);
      std::vector<double> grid;
      for (double g : c.lambda1_grid) {
        if (g > l1) grid.push_back(g);
      }
      grid.push_back(l1);
      c.lambda1_grid = grid;
      return cds_path(problem, c).estimate_at(l1);
    }
    case Method::lasso:
    case Method::enet: {
      PenaltyConfig pc = penalty_config(s.tuning);
      pc.lambda_grid = {l1};
      return (config.method == Method::lasso ? lasso_path(problem, pc) : elastic_net_path(problem, pc))
          .entries()
          .back()
          .estimate;
    }
    case Method::alasso: {
      PenaltyConfig pc = penalty_config(s.tuning);
      const std::uint64_t seed = required_seed(config, "by ALasso");
      const Vector initial = adaptive_lasso_path(problem, pc, s.tuning.folds, seed).initial;
      pc.lambda_grid = {l1};
      return adaptive_lasso_path(problem, pc, initial).path.entries().back().estimate;
    }
    case Method::oracle:
      break;
  }
  throw config_error("config field 'method': the oracle needs a known true model");
}

SolutionPath fit_model_path(const RegressionProblem& problem, const ModelConfig& config) {
  const MethodSettings s = resolve_settings(config, problem.n(), problem.p());
  PenaltyConfig pc = penalty_config(s.tuning);
  pc.lambda_grid = config.lambda1_grid;
  switch (config.method) {
    case Method::ds:
    case Method::tds: {
      const std::vector<double> grid =
          config.lambda1_grid.empty() ? dantzig_grid(problem, s.tuning) : config.lambda1_grid;
      SolutionPath path = dantzig_path(problem, grid);
      return config.method == Method::tds ? thresholded_path(path, s.tds_tau()) : path;
    }
    case Method::cds: {
      CdsConfig c = cds_config(problem, s.lambda0, s.lambda, s.tuning);
      if (!config.lambda1_grid.empty()) {
        c.lambda1_grid.clear();
        for (double g : config.lambda1_grid) {
          if (g >= s.lambda0) c.lambda1_grid.push_back(g);
        }
      }
      return cds_path(problem, c);
    }
    case Method::lasso:
      return lasso_path(problem, pc);
    case Method::enet:
      return elastic_net_path(problem, pc);
    case Method::alasso: {
      PenaltyConfig init = penalty_config(s.tuning);
      const std::uint64_t seed = required_seed(config, "by ALasso");
      return adaptive_lasso_path(problem, pc, adaptive_lasso_path(problem, init, s.tuning.folds, seed).initial).path;
    }
    case Method::oracle:
      break;
  }
  throw config_error("config field 'method': the oracle needs a known true model");
}

// ---------------------------------------------------------------------------

bool recovers_support(Method method, const RegressionProblem& problem, const Example1Config& config,
                      std::uint64_t cv_seed) {
  if (!problem.truth()) throw Error(ErrorCode::invalid_argument, "recovery needs the true model");
  const TrueModel& truth = *problem.truth();
  const TuningSettings& t = config.tuning;
  switch (method) {
    case Method::ds:
      return exact_recovery(dantzig_path(problem, dantzig_grid(problem, t)), truth);
    case Method::tds: {
      const SolutionPath path = dantzig_path(problem, dantzig_grid(problem, t));
      for (double tau : config.lambda_grid) {
        if (exact_recovery(thresholded_path(path, tau), truth)) return true;
      }
      return false;
    }
    case Method::lasso:
      return exact_recovery(lasso_path(problem, penalty_config(t)), truth);
    case Method::enet:
      return exact_recovery(elastic_net_path(problem, penalty_config(t)), truth);
    case Method::alasso:
      return exact_recovery(adaptive_lasso_path(problem, penalty_config(t), t.folds, cv_seed).path, truth);
    case Method::cds:
      for (double lambda0 : config.lambda0_grid) {
        for (double lambda : config.lambda_grid) {
          if (exact_recovery(cds_path(problem, cds_config(problem, lambda0, lambda, t)), truth)) return true;
        }
      }
      return false;
    case Method::oracle:
      return oracle_fit(problem).support == truth.support;
  }
  return false;
}

std::vector<RecoveryRow> run_example1(const Example1Config& config, int workers) {
  if (config.n_values.empty() || config.r_values.empty() || config.methods.empty()) {
    throw config_error("sparse recovery needs n values, r values and methods");
  }
  if (config.replications < 1) throw config_error("replications must be at least 1");
  const std::size_t cells = config.n_values.size() * config.r_values.size();
  const std::size_t reps = static_cast<std::size_t>(config.replications);
  const std::size_t nm = config.methods.size();
  std::vector<char> success(cells * reps * nm, 0);

  parallel_for(cells * reps, workers, [&](std::size_t task) {
    const std::size_t cell = task / reps;
    const std::size_t rep = task % reps;
    SimDesign d;
    d.kind = DesignKind::equicorrelated;
    d.n = config.n_values[cell / config.r_values.size()];
    d.p = config.p;
    d.correlation = config.r_values[cell % config.r_values.size()];
    d.truth = TrueModel(sparse_recovery_beta(config.p), 0.0);
    d.noiseless = true;
    d.seed = dataset_seed(config.seed, cell, rep);
    const RegressionProblem problem = generate(d);
    for (std::size_t m = 0; m < nm; ++m) {
      success[task * nm + m] = recovers_support(config.methods[m], problem, config, cv_seed_for(d.seed));
    }
  });

  std::vector<RecoveryRow> rows;
  for (std::size_t m = 0; m < nm; ++m) {
    for (std::size_t cell = 0; cell < cells; ++cell) {
      int hits = 0;
      for (std::size_t rep = 0; rep < reps; ++rep) hits += success[(cell * reps + rep) * nm + m];
      RecoveryRow row;
      row.method = to_string(config.methods[m]);
      row.n = config.n_values[cell / config.r_values.size()];
      row.r = config.r_values[cell % config.r_values.size()];
      row.recovery_probability = static_cast<double>(hits) / static_cast<double>(reps);
      row.replications = config.replications;
      row.seed = config.seed;
      rows.push_back(row);
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------

namespace {

SimDesign example2_design(Index n, Index p, double rho, double sigma, std::uint64_t seed) {
  SimDesign d;
  d.kind = DesignKind::ar1;
  d.n = n;
  d.p = p;
  d.correlation = rho;
  d.truth = TrueModel(strong_weak_beta(p), sigma);
  d.seed = seed;
  return d;
}

}  // namespace

Example2Result run_example2(const Example2Config& config, int workers) {
  if (config.methods.empty() || config.p_values.empty()) throw config_error("methods and p_values must be nonempty");
  if (config.replications < 2) throw config_error("replications must be at least 2 for standard errors");
  const std::size_t cells = config.p_values.size();
  const std::size_t reps = static_cast<std::size_t>(config.replications);
  const std::size_t nm = config.methods.size();
  MethodSettings settings;
  settings.lambda0 = config.lambda0;
  settings.lambda = config.lambda;
  settings.tds_threshold = config.tds_threshold;
  settings.tuning = config.tuning;

  std::vector<ReplicationRecord> records(cells * reps * nm);
  parallel_for(cells * reps, workers, [&](std::size_t task) {
    const std::size_t cell = task / reps;
    const std::size_t rep = task % reps;
    const Index p = config.p_values[cell];
    const SimDesign d = example2_design(config.n, p, config.rho, config.sigma, dataset_seed(config.seed, cell, rep));
    const RegressionProblem problem = generate(d);
    std::vector<Vector> betas;
    for (Method m : config.methods) betas.push_back(fit_method_cv(m, problem, settings, cv_seed_for(d.seed)).beta);
    const std::vector<double> pe =
        prediction_errors(d, problem.design(), config.test_size, test_sample_seed(d.seed), betas);
    for (std::size_t m = 0; m < nm; ++m) {
      ReplicationRecord& r = records[task * nm + m];
      r.replication = static_cast<int>(rep);
      r.p = p;
      r.method = to_string(config.methods[m]);
      r.pe = pe[m];
      const EstimationLosses loss = estimation_losses(betas[m], d.truth.beta0);
      r.l1 = loss.l1;
      r.l2 = loss.l2;
      r.linf = loss.linf;
      const SelectionErrors sel = fp_fn_counts(betas[m], d.truth, config.strong_threshold);
      r.fp = sel.fp;
      r.fn_strong = sel.fn_strong;
      r.fn_weak = sel.fn_weak;
    }
  });

  Example2Result result;
  result.records = records;
  const auto oracle = std::find(config.methods.begin(), config.methods.end(), Method::oracle);
  for (std::size_t task = 0; task < cells * reps; ++task) {
    if (oracle == config.methods.end()) break;
    const ReplicationRecord& o = records[task * nm + static_cast<std::size_t>(oracle - config.methods.begin())];
    for (std::size_t m = 0; m < nm; ++m) {
      const ReplicationRecord& r = records[task * nm + m];
      if (r.pe < o.pe) {
        result.warnings.push_back("p=" + std::to_string(r.p) + " replication " + std::to_string(r.replication) +
                                  ": Oracle PE " + format_number(o.pe) + " exceeds " + r.method + " PE " +
                                  format_number(r.pe));
      }
    }
  }
  for (std::size_t cell = 0; cell < cells; ++cell) {
    for (std::size_t m = 0; m < nm; ++m) {
      std::vector<double> pe, l1, l2, linf, fp, fns, fnw;
      for (std::size_t rep = 0; rep < reps; ++rep) {
        const ReplicationRecord& r = records[(cell * reps + rep) * nm + m];
        pe.push_back(r.pe);
        l1.push_back(r.l1);
        l2.push_back(r.l2);
        linf.push_back(r.linf);
        fp.push_back(static_cast<double>(r.fp));
        fns.push_back(static_cast<double>(r.fn_strong));
        fnw.push_back(static_cast<double>(r.fn_weak));
      }
      MeasureRow row;
      row.method = to_string(config.methods[m]);
      row.p = config.p_values[cell];
      row.pe = mean_se(pe);
      row.l1 = mean_se(l1);
      row.l2 = mean_se(l2);
      row.linf = mean_se(linf);
      row.fp = mean_se(fp);
      row.fn_strong = mean_se(fns);
      row.fn_weak = mean_se(fnw);
      row.replications = config.replications;
      result.summary.push_back(row);
    }
  }
  return result;
}

std::vector<RobustnessCell> run_robustness(const RobustnessConfig& config, int workers) {
  if (config.lambda0_grid.empty() || config.lambda_grid.empty()) throw config_error("grids must be nonempty");
  if (config.replications < 2) throw config_error("replications must be at least 2 for standard errors");
  const std::size_t reps = static_cast<std::size_t>(config.replications);
  const std::size_t cells = config.lambda0_grid.size() * config.lambda_grid.size();
  std::vector<double> pe(reps * cells);

  parallel_for(reps, workers, [&](std::size_t rep) {
    // Cell 0 of the comparison driver: the same datasets as its first p.
    const SimDesign d = example2_design(config.n, config.p, config.rho, config.sigma, dataset_seed(config.seed, 0, rep));
    const RegressionProblem problem = generate(d);
    std::vector<Vector> betas;
    for (std::size_t c = 0; c < cells; ++c) {
      MethodSettings s;
      s.lambda0 = config.lambda0_grid[c / config.lambda_grid.size()];
      s.lambda = config.lambda_grid[c % config.lambda_grid.size()];
      s.tuning = config.tuning;
      betas.push_back(fit_method_cv(Method::cds, problem, s, cv_seed_for(d.seed)).beta);
    }
    const std::vector<double> errors =
        prediction_errors(d, problem.design(), config.test_size, test_sample_seed(d.seed), betas);
    for (std::size_t c = 0; c < cells; ++c) pe[rep * cells + c] = errors[c];
  });

  std::vector<RobustnessCell> out;
  for (std::size_t c = 0; c < cells; ++c) {
    std::vector<double> values;
    for (std::size_t rep = 0; rep < reps; ++rep) values.push_back(pe[rep * cells + c]);
    RobustnessCell cell;
    cell.lambda0 = config.lambda0_grid[c / config.lambda_grid.size()];
    cell.lambda = config.lambda_grid[c % config.lambda_grid.size()];
    cell.pe = mean_se(values);
    cell.replications = config.replications;
    out.push_back(cell);
  }
  return out;
}

SplitEvalResult run_split_eval(const CsvDataset& data, const SplitEvalConfig& config, int workers) {
  const Index n = data.x.rows();
  const Index p = data.x.cols();
  if (config.methods.empty()) throw config_error("methods must be nonempty");
  if (std::find(config.methods.begin(), config.methods.end(), Method::oracle) != config.methods.end()) {
    throw config_error("the oracle needs a known true model and cannot run on user data");
  }
  if (config.train_size < config.tuning.folds || config.train_size >= n) {
    throw config_error("train_size must lie in [folds, n - 1] (n = " + std::to_string(n) + ")");
  }
  if (config.splits < 2) throw config_error("splits must be at least 2");
  const std::size_t splits = static_cast<std::size_t>(config.splits);
  const std::size_t nm = config.methods.size();
  ModelConfig model;
  model.lambda0 = config.lambda0;
  model.lambda = config.lambda;
  model.tds_threshold = config.tds_threshold;
  model.tuning = config.tuning;
  const MethodSettings settings = resolve_settings(model, config.train_size, p);

  std::vector<SplitRecord> records(splits * nm);
  parallel_for(splits, workers, [&](std::size_t s) {
    const std::uint64_t seed = dataset_seed(config.seed, 0, s);
    Rng rng(seed);
    const auto perm = rng.permutation(static_cast<std::size_t>(n));
    std::vector<Index> train(perm.begin(), perm.begin() + config.train_size);
    std::vector<Index> test(perm.begin() + config.train_size, perm.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    Matrix raw_train(static_cast<Index>(train.size()), p);
    Vector y_train(static_cast<Index>(train.size()));
    for (std::size_t i = 0; i < train.size(); ++i) {
      raw_train.row(static_cast<Index>(i)) = data.x.row(train[i]);
      y_train(static_cast<Index>(i)) = data.y(train[i]);
    }
    Matrix raw_test(static_cast<Index>(test.size()), p);
    Vector y_test(static_cast<Index>(test.size()));
    for (std::size_t i = 0; i < test.size(); ++i) {
      raw_test.row(static_cast<Index>(i)) = data.x.row(test[i]);
      y_test(static_cast<Index>(i)) = data.y(test[i]);
    }
    const DesignMatrix design = rescale_columns(DesignMatrix(raw_train), config.center);
    const double offset = config.center ? y_train.mean() : 0.0;
    const RegressionProblem problem(design, (y_train.array() - offset).matrix());
    const Matrix x_test = design.transform_raw(raw_test);
    for (std::size_t m = 0; m < nm; ++m) {
      const SparseEstimate est = fit_method_cv(config.methods[m], problem, settings, cv_seed_for(seed));
      const Vector resid = (y_test.array() - offset).matrix() - x_test * est.beta;
      SplitRecord& r = records[s * nm + m];
      r.split = static_cast<int>(s);
      r.method = to_string(config.methods[m]);
      r.pe = resid.squaredNorm() / static_cast<double>(resid.size());
      r.model_size = est.size();
    }
  });

  SplitEvalResult result;
  result.records = records;
  const auto cds_it = std::find(config.methods.begin(), config.methods.end(), Method::cds);
  std::vector<double> cds_pe;
  if (cds_it != config.methods.end()) {
    const std::size_t c = static_cast<std::size_t>(cds_it - config.methods.begin());
    for (std::size_t s = 0; s < splits; ++s) cds_pe.push_back(records[s * nm + c].pe);
  }
  for (std::size_t m = 0; m < nm; ++m) {
    std::vector<double> pe;
    std::vector<double> sizes;
    for (std::size_t s = 0; s < splits; ++s) {
      pe.push_back(records[s * nm + m].pe);
      sizes.push_back(static_cast<double>(records[s * nm + m].model_size));
    }
    SplitMethodRow row;
    row.method = to_string(config.methods[m]);
    row.pe = mean_se(pe);
    std::sort(sizes.begin(), sizes.end());
    const std::size_t h = sizes.size() / 2;
    row.median_model_size = sizes.size() % 2 ? sizes[h] : 0.5 * (sizes[h - 1] + sizes[h]);
    if (cds_pe.empty()) {
      row.p_value_vs_cds = kNaN;
    } else {
      const PairedTTest t = paired_t_test(cds_pe, pe);
      row.p_value_vs_cds = t.p_value;
      row.zero_variance = t.zero_variance;
    }
    row.splits = config.splits;
    result.rows.push_back(row);
  }
  return result;
}

// ---------------------------------------------------------------------------

Example1Config parse_example1_config(const std::string& json_text) {
  const json j = parse_text(json_text);
  Fields f(j);
  Example1Config c;
  c.seed = f.seed();
  std::vector<Index> paper_n;
  for (Index n = 30; n <= 80; n += 2) paper_n.push_back(n);
  c.n_values = f.integers("n_values", paper_n, 2);
  c.r_values = f.numbers("r_values", {0.0, 0.2, 0.5}, 0.0, 0.999999, "[0, 1)");
  c.p = static_cast<Index>(f.integer("p", c.p, 7));
  c.replications = static_cast<int>(f.integer("replications", c.replications, 1));
  c.methods = f.methods("methods", {Method::ds, Method::tds, Method::lasso, Method::enet, Method::alasso, Method::cds});
  c.lambda0_grid = f.numbers("lambda0_grid", c.lambda0_grid, 1e-300, 1e300, "(0, inf)");
  c.lambda_grid = f.numbers("lambda_grid", c.lambda_grid, 0.0, 1e300, "[0, inf)");
  c.tuning = f.tuning();
  f.finish();
  require_decreasing_free(c.lambda0_grid, "lambda0_grid");
  require_decreasing_free(c.lambda_grid, "lambda_grid");
  for (Index n : c.n_values) {
    if (n < c.tuning.folds) throw config_error("config field 'n_values': every n must be at least folds");
  }
  return c;
}

Example2Config parse_example2_config(const std::string& json_text) {
  const json j = parse_text(json_text);
  Fields f(j);
  Example2Config c;
  c.seed = f.seed();
  c.n = static_cast<Index>(f.integer("n", c.n, 2));
  c.p_values = f.integers("p_values", c.p_values, 36);
  c.sigma = f.number("sigma", c.sigma, 0.0, 1e300, "[0, inf)");
  c.rho = f.number("rho", c.rho, 0.0, 0.999999, "[0, 1)");
  c.replications = static_cast<int>(f.integer("replications", c.replications, 2));
  c.methods = f.methods("methods", kAllMethods);
  c.lambda0 = f.number("lambda0", c.lambda0, 1e-300, 1e300, "(0, inf)");
  c.lambda = f.number("lambda", c.lambda, 0.0, 1e300, "[0, inf)");
  c.tds_threshold = f.number("tds_threshold", c.tds_threshold, 0.0, 1e300, "[0, inf)");
  c.test_size = static_cast<Index>(f.integer("test_size", c.test_size, 1));
  c.strong_threshold = f.number("strong_threshold", c.strong_threshold, 0.0, 1e300, "[0, inf)");
  c.tuning = f.tuning();
  f.finish();
  if (c.n < c.tuning.folds) throw config_error("config field 'n': must be at least folds");
  return c;
}

RobustnessConfig parse_robustness_config(const std::string& json_text) {
  const json j = parse_text(json_text);
  Fields f(j);
  RobustnessConfig c;
  c.seed = f.seed();
  c.n = static_cast<Index>(f.integer("n", c.n, 2));
  c.p = static_cast<Index>(f.integer("p", c.p, 36));
  c.sigma = f.number("sigma", c.sigma, 0.0, 1e300, "[0, inf)");
  c.rho = f.number("rho", c.rho, 0.0, 0.999999, "[0, 1)");
  c.replications = static_cast<int>(f.integer("replications", c.replications, 2));
  c.lambda0_grid = f.numbers("lambda0_grid", c.lambda0_grid, 1e-300, 1e300, "(0, inf)");
  c.lambda_grid = f.numbers("lambda_grid", c.lambda_grid, 0.0, 1e300, "[0, inf)");
  c.test_size = static_cast<Index>(f.integer("test_size", c.test_size, 1));
  c.tuning = f.tuning();
  f.finish();
  require_decreasing_free(c.lambda0_grid, "lambda0_grid");
  require_decreasing_free(c.lambda_grid, "lambda_grid");
  if (c.n < c.tuning.folds) throw config_error("config field 'n': must be at least folds");
  return c;
}

SplitEvalConfig parse_split_eval_config(const std::string& json_text) {
  const json j = parse_text(json_text);
  Fields f(j);
  SplitEvalConfig c;
  c.seed = f.seed();
  c.train_size = static_cast<Index>(f.integer("train_size", 0, 1));
  if (c.train_size == 0) throw config_error("config field 'train_size': required");
  c.splits = static_cast<int>(f.integer("splits", c.splits, 2));
  c.methods = f.methods("methods", {Method::ds, Method::tds, Method::lasso, Method::enet, Method::alasso, Method::cds});
  c.response_column = f.text("response_column");
  c.center = f.boolean("center", c.center);
  c.lambda0 = f.number("lambda0", c.lambda0, 0.0, 1e300, "[0, inf)");
  c.lambda = f.number("lambda", c.lambda, 0.0, 1e300, "[0, inf)");
  c.tds_threshold = f.number("tds_threshold", c.tds_threshold, 0.0, 1e300, "[0, inf)");
  c.tuning = f.tuning();
  f.finish();
  return c;
}

ModelConfig parse_model_config(const std::string& json_text) {
  const json j = parse_text(json_text);
  Fields f(j);
  ModelConfig c;
  if (const auto name = f.text("method")) {
    try {
      c.method = parse_method(*name);
    } catch (const Error& err) {
      throw config_error(std::string("config field 'method': ") + err.what());
    }
  }
  if (c.method == Method::oracle) throw config_error("config field 'method': the oracle needs a known true model");
  c.response_column = f.text("response_column");
  c.center = f.boolean("center", c.center);
  c.lambda1 = f.number("lambda1", c.lambda1, 0.0, 1e300, "[0, inf)");
  c.lambda1_grid = f.numbers("lambda1_grid", {}, 1e-300, 1e300, "(0, inf)");
  for (std::size_t k = 1; k < c.lambda1_grid.size(); ++k) {
    if (!(c.lambda1_grid[k] < c.lambda1_grid[k - 1])) {
      throw config_error("config field 'lambda1_grid': must be strictly decreasing");
    }
  }
  c.lambda0 = f.number("lambda0", c.lambda0, 0.0, 1e300, "[0, inf)");
  c.lambda = f.number("lambda", c.lambda, 0.0, 1e300, "[0, inf)");
  c.tds_threshold = f.number("tds_threshold", c.tds_threshold, 0.0, 1e300, "[0, inf)");
  c.tuning = f.tuning();
  if (j.contains("seed") && !j.at("seed").is_null()) {
    c.seed = f.seed();
  } else {
    f.text("seed");
  }
  f.finish();
  return c;
}

std::string canonical_json(const ModelConfig& c) {
  json j;
  j["method"] = to_string(c.method);
  j["response_column"] = c.response_column ? json(*c.response_column) : json(nullptr);
  j["center"] = c.center;
  j["lambda1"] = c.lambda1;
  if (!c.lambda1_grid.empty()) j["lambda1_grid"] = c.lambda1_grid;
  j["lambda0"] = c.lambda0;
  j["lambda"] = c.lambda;
  j["tds_threshold"] = c.tds_threshold;
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  add_tuning(j, c.tuning);
  return j.dump();
}

std::string canonical_json(const Example1Config& c) {
  json j;
  j["seed"] = c.seed;
  j["n_values"] = c.n_values;
  j["r_values"] = c.r_values;
  j["p"] = c.p;
  j["replications"] = c.replications;
  j["methods"] = methods_json(c.methods);
  j["lambda0_grid"] = c.lambda0_grid;
  j["lambda_grid"] = c.lambda_grid;
  add_tuning(j, c.tuning);
  return j.dump();
}

std::string canonical_json(const Example2Config& c) {
  json j;
  j["seed"] = c.seed;
  j["n"] = c.n;
  j["p_values"] = c.p_values;
  j["sigma"] = c.sigma;
  j["rho"] = c.rho;
  j["replications"] = c.replications;
  j["methods"] = methods_json(c.methods);
  j["lambda0"] = c.lambda0;
  j["lambda"] = c.lambda;
  j["tds_threshold"] = c.tds_threshold;
  j["test_size"] = c.test_size;
  j["strong_threshold"] = c.strong_threshold;
  add_tuning(j, c.tuning);
  return j.dump();
}

std::string canonical_json(const RobustnessConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["n"] = c.n;
  j["p"] = c.p;
  j["sigma"] = c.sigma;
  j["rho"] = c.rho;
  j["replications"] = c.replications;
  j["lambda0_grid"] = c.lambda0_grid;
  j["lambda_grid"] = c.lambda_grid;
  j["test_size"] = c.test_size;
  add_tuning(j, c.tuning);
  return j.dump();
}

std::string canonical_json(const SplitEvalConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["train_size"] = c.train_size;
  j["splits"] = c.splits;
  j["methods"] = methods_json(c.methods);
  j["response_column"] = c.response_column ? json(*c.response_column) : json(nullptr);
  j["center"] = c.center;
  j["lambda0"] = c.lambda0;
  j["lambda"] = c.lambda;
  j["tds_threshold"] = c.tds_threshold;
  add_tuning(j, c.tuning);
  return j.dump();
}

// ---------------------------------------------------------------------------

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

void write_recovery_csv(std::ostream& out, const std::vector<RecoveryRow>& rows) {
  out << "method,n,r,recovery_probability,replications,seed\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.n << ',' << format_number(r.r) << ',' << format_number(r.recovery_probability)
        << ',' << r.replications << ',' << r.seed << '\n';
  }
}

void write_measures_csv(std::ostream& out, const std::vector<MeasureRow>& rows) {
  out << "method,p,pe_mean,pe_se,l1_mean,l1_se,l2_mean,l2_se,linf_mean,linf_se,fp_mean,fp_se,"
         "fn_strong_mean,fn_strong_se,fn_weak_mean,fn_weak_se,replications\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.p;
    for (const MeanSe* m : {&r.pe, &r.l1, &r.l2, &r.linf, &r.fp, &r.fn_strong, &r.fn_weak}) write_mean_se(out, *m);
    out << ',' << r.replications << '\n';
  }
}

void write_replications_csv(std::ostream& out, const std::vector<ReplicationRecord>& records) {
  out << "replication,p,method,pe,l1,l2,linf,fp,fn_strong,fn_weak\n";
  for (const auto& r : records) {
    out << r.replication << ',' << r.p << ',' << r.method << ',' << format_number(r.pe) << ','
        << format_number(r.l1) << ',' << format_number(r.l2) << ',' << format_number(r.linf) << ',' << r.fp
        << ',' << r.fn_strong << ',' << r.fn_weak << '\n';
  }
}

void write_robustness_csv(std::ostream& out, const std::vector<RobustnessCell>& cells) {
  out << "lambda0,lambda,pe_mean,pe_se,replications\n";
  for (const auto& c : cells) {
    out << format_number(c.lambda0) << ',' << format_number(c.lambda);
    write_mean_se(out, c.pe);
    out << ',' << c.replications << '\n';
  }
}

void write_split_eval_csv(std::ostream& out, const std::vector<SplitMethodRow>& rows) {
  out << "method,pe_mean,pe_se,median_model_size,p_value_vs_cds,zero_variance,splits\n";
  for (const auto& r : rows) {
    out << r.method;
    write_mean_se(out, r.pe);
    out << ',' << format_number(r.median_model_size) << ',' << format_number(r.p_value_vs_cds) << ','
        << (r.zero_variance ? 1 : 0) << ',' << r.splits << '\n';
  }
}

void write_split_records_csv(std::ostream& out, const std::vector<SplitRecord>& records) {
  out << "split,method,pe,model_size\n";
  for (const auto& r : records) {
    out << r.split << ',' << r.method << ',' << format_number(r.pe) << ',' << r.model_size << '\n';
  }
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_manifest(std::ostream& out, const RunManifest& manifest) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(manifest.config_json)));
  json j;
  j["command"] = manifest.command;
  j["config"] = manifest.config_json.empty() ? json(nullptr) : json::parse(manifest.config_json);
  j["config_hash"] = hash;
  j["seed"] = manifest.seed;
  j["software_version"] = CDS_VERSION;
  j["outputs"] = manifest.outputs;
  j["warnings"] = manifest.warnings;
  out << j.dump(2) << '\n';
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task) {
  const std::size_t threads = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = count;
  std::exception_ptr failure;
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        // Keep the error of the lowest index so the report is deterministic.
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace cds
