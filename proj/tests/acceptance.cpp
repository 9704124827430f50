// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Usage: acceptance <cds-cli> <work-dir>

#include "cds/datagen.hpp"
#include "cds/diagnostics.hpp"
#include "cds/experiments.hpp"
#include "cds/selectors.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <mutex>
#include <thread>

using namespace cds;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << detail << std::endl;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

RegressionProblem small_problem(Index n, Index p, std::uint64_t seed, double noise) {
  const Matrix x = oracle::gaussian_scaled(n, p, seed);
  Vector beta = Vector::Zero(p);
  beta(0) = 1.5;
  if (p > 2) beta(2) = -1.0;
  const Vector y = x * beta + noise * oracle::gaussian_vector(n, seed + 1000);
  return RegressionProblem(rescale_columns(DesignMatrix(x)), y);
}

void lp_equivalence() {
  const Stopwatch clock;
  double worst = 0.0;
  bool ok = true;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const Index m = 1 + static_cast<Index>(seed % 6);
    const Index k = 1 + static_cast<Index>((seed * 7 + seed / 6) % 8);
    const LpProblem lp = oracle::random_lp(m, k, 10000 + seed);
    const auto expected = oracle::lp_minimum(lp);
    const LpSolution s = solve_lp(lp);
    if (!expected || s.status != LpStatus::optimal) {
      ok = false;
      continue;
    }
    worst = std::max(worst, std::abs(s.objective_value - *expected));
  }
  const double t = clock.seconds();
  report(1, ok && worst <= 1e-6 && t < 10.0,
         "200 LPs, max |obj - oracle| = " + fmt("%.3g", worst) + ", " + fmt("%.2f", t) + " s");
}

void dantzig_correctness() {
  const Stopwatch clock;
  double worst = 0.0, worst_res = 0.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Index n = 6 + static_cast<Index>(seed % 7);
    const Index p = 2 + static_cast<Index>(seed % 5);
    const RegressionProblem pr = small_problem(n, p, 500 + seed, 1.0);
    const double lambda1 = (0.1 + 0.15 * static_cast<double>(seed % 4)) * pr.lambda_max();
    const Matrix& x = pr.design().values();
    const double nn = static_cast<double>(n);
    const double expected = oracle::dantzig_l1_minimum(x.transpose() * x / nn, x.transpose() * pr.response() / nn,
                                                       Vector::Constant(p, lambda1));
    const SparseEstimate e = dantzig_selector(pr, lambda1);
    worst = std::max(worst, std::abs(e.l1_norm - expected));
    worst_res = std::max(worst_res, pr.correlations(e.beta).lpNorm<Eigen::Infinity>() - lambda1);
  }
  const double t = clock.seconds();
  report(2, worst <= 1e-5 && worst_res <= 1e-8 && t < 30.0,
         "50 problems, max |L1 - oracle| = " + fmt("%.3g", worst) + ", max residual = " + fmt("%.3g", worst_res) +
             ", " + fmt("%.2f", t) + " s");
}

void cds_reduction() {
  const Stopwatch clock;
  int good = 0;
  bool feasible = true;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const RegressionProblem pr = small_problem(30, 10, 700 + seed, 1.0);
    const double lambda1 = 0.3 * pr.lambda_max();
    CdsConfig c;
    c.lambda = 0.0;
    c.lambda0 = lambda1;
    const SparseEstimate e = cds_fit_single(pr, lambda1, c, SparseEstimate::zeros(pr.p()));
    if (!e.converged) continue;
    if (cds_constraint_residual(pr, e.beta, c.lambda0, lambda1) > c.feas_tol) {
      feasible = false;
      continue;
    }
    if (e.l1_norm <= dantzig_selector(pr, lambda1).l1_norm * (1 + 1e-6)) ++good;
  }
  const double t = clock.seconds();
  report(3, feasible && good >= 28 && t < 60.0,
         std::to_string(good) + "/30 feasible with L1 <= DS L1 (1 + 1e-6), " + fmt("%.2f", t) + " s");
}

void fixed_point() {
  double worst = 0.0;
  int converged = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const RegressionProblem pr = small_problem(40, 30, 900 + seed, 0.5);
    CdsConfig c;
    c.lambda0 = 0.01;
    c.lambda = 0.2;
    const double lambda1 = 0.25 * pr.lambda_max();
    const SparseEstimate e = cds_fit_single(pr, lambda1, c, SparseEstimate::zeros(pr.p()));
    if (!e.converged) continue;
    ++converged;
    const SparseEstimate again = cds_fit_single(pr, lambda1, c, e);
    worst = std::max(worst, (again.beta - e.beta).lpNorm<Eigen::Infinity>());
  }
  report(4, converged == 30 && worst <= 1e-8,
         std::to_string(converged) + "/30 converged, max change on refit = " + fmt("%.3g", worst));
}

void example1() {
  const Stopwatch clock;
  Example1Config c;
  c.n_values = {40, 60, 80};
  c.r_values = {0.0, 0.5};
  c.p = 1000;
  c.replications = 30;
  c.methods = {Method::ds, Method::cds};
  c.seed = 20110101;
  const auto rows = run_example1(c, workers());
  bool ok = true;
  std::ostringstream detail;
  double cds_80_0 = -1.0;
  for (const auto& cds_row : rows) {
    if (cds_row.method != "CDS") continue;
    for (const auto& ds_row : rows) {
      if (ds_row.method == "DS" && ds_row.n == cds_row.n && ds_row.r == cds_row.r) {
        ok = ok && cds_row.recovery_probability >= ds_row.recovery_probability;
        detail << " (n=" << cds_row.n << ",r=" << cds_row.r << ") CDS " << cds_row.recovery_probability << " DS "
               << ds_row.recovery_probability << ";";
      }
    }
    if (cds_row.n == 80 && cds_row.r == 0.0) cds_80_0 = cds_row.recovery_probability;
  }
  report(5, ok && cds_80_0 >= 0.9, "recovery" + detail.str() + " " + fmt("%.0f", clock.seconds()) + " s");
}

void example2() {
  const Stopwatch clock;
  Example2Config c;
  c.p_values = {1000};
  c.replications = 20;
  c.methods = {Method::ds, Method::cds};
  c.seed = 20110102;
  const Example2Result r = run_example2(c, workers());
  const MeasureRow* cds_row = nullptr;
  const MeasureRow* ds_row = nullptr;
  for (const auto& row : r.summary) {
    if (row.method == "CDS") cds_row = &row;
    if (row.method == "DS") ds_row = &row;
  }
  if (!cds_row || !ds_row) {
    report(6, false, "missing summary rows");
    return;
  }
  const bool ok = cds_row->pe.mean >= 0.17 && cds_row->pe.mean <= 0.21 && cds_row->fp.mean <= 1.0 &&
                  cds_row->fn_strong.mean == 0.0 && cds_row->fn_weak.mean >= 5.5 && cds_row->pe.mean <= ds_row->pe.mean;
  report(6, ok,
         "CDS PE " + fmt("%.4f", cds_row->pe.mean) + ", FP " + fmt("%.2f", cds_row->fp.mean) + ", FN.strong " +
             fmt("%.2f", cds_row->fn_strong.mean) + ", FN.weak " + fmt("%.2f", cds_row->fn_weak.mean) + "; DS PE " +
             fmt("%.4f", ds_row->pe.mean) + "; L1 " + fmt("%.3f", cds_row->l1.mean) + " L2 " +
             fmt("%.3f", cds_row->l2.mean) + " Linf " + fmt("%.3f", cds_row->linf.mean) + ", " +
             fmt("%.0f", clock.seconds()) + " s");
}

void robustness() {
  const Stopwatch clock;
  RobustnessConfig c;
  c.replications = 10;
  c.lambda0_grid = {0.005, 0.01, 0.02};
  c.lambda_grid = {0.15, 0.2, 0.25};
  c.seed = 20110103;
  const auto cells = run_robustness(c, workers());
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& cell : cells) {
    lo = std::min(lo, cell.pe.mean);
    hi = std::max(hi, cell.pe.mean);
  }
  report(7, cells.size() == 9 && hi - lo <= 0.02,
         "cell PE means in [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "], spread " + fmt("%.4f", hi - lo) + ", " +
             fmt("%.0f", clock.seconds()) + " s");
}

void sign_consistency() {
  const Stopwatch clock;
  const Index n = 200, p = 500, s = 3;
  const double min_signal = 10.0 * std::sqrt(s * std::log(static_cast<double>(n)) / n);
  int exact = 0;
  Index worst_fs = 0;
  std::mutex m;
  parallel_for(30, workers(), [&](std::size_t rep) {
    Vector beta = Vector::Zero(p);
    beta(0) = min_signal;
    beta(1) = -min_signal;
    beta(2) = 1.5 * min_signal;
    SimDesign d;
    d.kind = DesignKind::equicorrelated;
    d.n = n;
    d.p = p;
    d.correlation = 0.0;
    d.truth = TrueModel(beta, 1.0);
    d.seed = dataset_seed(20110104, 0, rep);
    const RegressionProblem pr = generate(d);
    MethodSettings settings;
    const CdsConfig h = CdsConfig::heuristic(n, p);
    settings.lambda0 = h.lambda0;
    settings.lambda = h.lambda;
    const SparseEstimate e = fit_method_cv(Method::cds, pr, settings, cv_seed_for(d.seed));
    const Index fs = false_sign_count(e.beta, beta);
    std::lock_guard<std::mutex> lock(m);
    if (fs == 0) ++exact;
    worst_fs = std::max(worst_fs, fs);
  });
  report(8, exact >= 27 && worst_fs < s,
         std::to_string(exact) + "/30 exact sign recovery, max FS = " + std::to_string(worst_fs) + ", " +
             fmt("%.0f", clock.seconds()) + " s");
}

void diagnostics() {
  double worst = -INFINITY;
  bool monotone = true;
  std::mt19937_64 gen(20110105);
  std::normal_distribution<double> nd;
  auto random_subset = [&](std::vector<int>& pool, int size) {
    std::shuffle(pool.begin(), pool.end(), gen);
    return std::vector<int>(pool.begin(), pool.begin() + size);
  };
  for (std::uint64_t design = 1; design <= 20; ++design) {
    const DesignMatrix x = rescale_columns(DesignMatrix(oracle::gaussian_scaled(30, 8, 3000 + design)));
    const Matrix& v = x.values();
    const double delta = restricted_isometry_constant(x, 2);
    const double theta = restricted_orthogonality_constant(x, 2);
    std::vector<int> pool{0, 1, 2, 3, 4, 5, 6, 7};
    for (int probe = 0; probe < 10000; ++probe) {
      const int a = 1 + static_cast<int>(gen() % 2);
      const int b = 1 + static_cast<int>(gen() % 4);
      const auto cols = random_subset(pool, a + b);
      Vector h = Vector::Zero(8), g = Vector::Zero(8);
      for (int i = 0; i < a; ++i) h(cols[i]) = nd(gen);
      for (int i = a; i < a + b; ++i) g(cols[i]) = nd(gen);
      h.normalize();
      g.normalize();
      const Vector xh = v * h / std::sqrt(30.0);
      const double q = xh.squaredNorm();
      worst = std::max({worst, q - (1 + delta), (1 - delta) - q});
      worst = std::max(worst, std::abs(xh.dot(v * g / std::sqrt(30.0))) - theta);
    }
    double prev_d = 0.0, prev_t = 0.0;
    for (Index s = 1; s <= 3; ++s) {
      const double d = restricted_isometry_constant(x, s);
      const double t = restricted_orthogonality_constant(x, s);
      monotone = monotone && d >= prev_d - 1e-12 && t >= prev_t - 1e-12;
      prev_d = d;
      prev_t = t;
    }
  }
  report(9, worst <= 1e-10 && monotone,
         "max probe excess over the bounds = " + fmt("%.3g", worst) + (monotone ? ", monotone in s" : ", NOT monotone"));
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void determinism(const std::string& cli, const fs::path& work) {
  fs::create_directories(work);
  const fs::path config = work / "sim2.json";
  {
    std::ofstream out(config);
    out << R"({"seed": 424242, "n": 50, "p_values": [60], "replications": 3, "test_size": 1000, "grid_length": 15})";
  }
  bool ok = true;
  for (const char* run : {"run_a", "run_b"}) {
    const std::string cmd = cli + " sim2 -c " + config.string() + " -o " + (work / run).string() + " -w " +
                            std::to_string(workers()) + " > /dev/null 2>&1";
    ok = ok && std::system(cmd.c_str()) == 0;
  }
  bool same = ok;
  for (const char* file : {"measures.csv", "replications.csv"}) {
    const std::string a = slurp(work / "run_a" / file);
    same = same && !a.empty() && a == slurp(work / "run_b" / file);
  }
  report(10, same, ok ? (same ? "measures.csv and replications.csv byte-identical" : "outputs differ")
                      : "sim2 run failed");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <cds-cli> <work-dir>\n";
    return 2;
  }
  const auto guard = [](int id, const std::function<void()>& f) {
    try {
      f();
    } catch (const std::exception& e) {
      report(id, false, std::string("exception: ") + e.what());
    }
  };
  guard(1, lp_equivalence);
  guard(2, dantzig_correctness);
  guard(3, cds_reduction);
  guard(4, fixed_point);
  guard(5, example1);
  guard(6, example2);
  guard(7, robustness);
  guard(8, sign_consistency);
  guard(9, diagnostics);
  guard(10, [&] { determinism(argv[1], argv[2]); });
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
