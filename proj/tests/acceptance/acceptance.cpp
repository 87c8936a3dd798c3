// Acceptance checks. One PASS/FAIL line per criterion with the measured
// values; argv[1] selects a single criterion, no argument runs all.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bheat/errors.hpp"
#include "bheat/experiment.hpp"

using namespace bheat;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Log {
 public:
  void check(bool ok, const std::string& what) {
    pass_ = pass_ && ok;
    if (!ok) failures_ << (failures_.tellp() > 0 ? "; " : "") << what;
  }
  void note(const std::string& s) { notes_ << (notes_.tellp() > 0 ? "; " : "") << s; }
  Outcome done() const {
    std::string d = notes_.str();
    if (!pass_) d += " | failed: " + failures_.str();
    return {pass_, d};
  }

 private:
  bool pass_ = true;
  std::ostringstream notes_;
  std::ostringstream failures_;
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

Outcome orthogonality() {
  Log log;
  double worst = 0.0;
  long cases = 0;
  for (int n = 2; n <= 16; ++n)
    for (int m = 2; m <= 16; ++m) {
      const GridSpec g(n, m);
      for (int p = 1; p < n; ++p)
        for (int q = 1; q < m; ++q)
          for (int r = 1; r < n; ++r)
            for (int s = 1; s < m; ++s) {
              const double d = std::abs(delta_orthogonality(g, p, q, r, s) - delta_orthogonality_predicted(n, m, p, q, r, s));
              worst = std::max(worst, d);
              ++cases;
            }
    }
  log.note(fmt("in-range cases %ld, max |direct - closed form| %.3g", cases, worst));
  log.check(worst <= 1e-12, "in-range mismatch");

  double worst_alias = 0.0;
  long alias_cases = 0;
  for (int n = 2; n <= 16; ++n)
    for (int m : {2, 7, 16}) {
      const GridSpec g(n, m);
      for (int p = 1; p < n; ++p)
        for (int r = n; r <= 4 * n + 1; ++r)
          for (int q = 1; q < m; q += 2)
            for (int s : {q, 2 * m - q, 2 * m + q}) {
              const double d = std::abs(delta_orthogonality(g, p, q, r, s) - delta_orthogonality_predicted(n, m, p, q, r, s));
              worst_alias = std::max(worst_alias, d);
              ++alias_cases;
            }
    }
  log.note(fmt("aliased cases %ld, max mismatch %.3g", alias_cases, worst_alias));
  log.check(worst_alias <= 1e-12, "aliased mismatch");
  return log.done();
}

Outcome quadrature() {
  Log log;
  const auto& r = gauss_legendre_512();
  const double a1 = integrate_gl([](double s) { return 2.0 - s; }, 0.0, 1.0, r);
  const double a2 = integrate_gl([](double s) { return 0.5 * std::exp(-s); }, 0.0, 1.0, r);
  const double e1 = std::abs(a1 - 1.5);
  const double e2 = std::abs(a2 - 0.5 * (1.0 - std::exp(-1.0)));
  const TimeGrid tg(1.0, 100);
  std::vector<double> ex;
  for (double t : tg.points()) ex.push_back(std::exp(t));
  const double e3 = std::abs(integrate_time_series(ex, tg) - (std::exp(1.0) - 1.0));
  log.note(fmt("A(1) = %.15g (err %.2g), %.15g (err %.2g), composite e^t err %.2g", a1, e1, a2, e2, e3));
  log.check(e1 <= 1e-10, "linear profile");
  log.check(e2 <= 1e-10, "exponential profile");
  log.check(e3 <= 1e-7, "composite rule");
  return log.done();
}

Outcome roundtrip() {
  Log log;
  const NoiseSpec quiet;
  {
    const auto ex1 = builtin_example(1);
    const GridSpec g(21, 21);
    const auto ds = synthesize_dataset(ex1, g, TimeGrid(1.0, 100), quiet);
    const Matrix truth = ex1.sample_theta(g);
    const double tr = rmse(truncated_estimator(ds, ex1.profile, TruncationRule::manual(1, 1)).field(g), truth);
    const double cs = rmse(classical_estimator(ds, ex1.profile, 1, 1).field(g), truth);
    log.note(fmt("example 1 RMSE truncated %.3g, classical %.3g", tr, cs));
    log.check(tr <= 1e-6 && cs <= 1e-6, "example 1");
  }
  {
    const auto ex2 = builtin_example(2);
    // Only q = 1 carries energy; the tail is the odd p >= 7 part of theta.
    double tail = 0.0;
    for (int p = 7; p < 2000001; p += 2) tail += std::pow(ex2.theta_coeff(p, 1), 2);
    const double expected = std::sqrt(tail) / kPi;
    const GridSpec g(512, 16);
    const auto ds = synthesize_dataset(ex2, g, TimeGrid(1.0, 100), quiet);
    const Matrix truth = ex2.sample_theta(g);
    const double tr = rmse(truncated_estimator(ds, ex2.profile, TruncationRule::manual(5, 1)).field(g), truth);
    const double cs = rmse(classical_estimator(ds, ex2.profile, 5, 1).field(g), truth);
    log.note(fmt("example 2 on 512x16: tail level %.6g, RMSE truncated %.6g, classical %.6g", expected, tr, cs));
    log.check(std::abs(tr - expected) <= 1e-4 && std::abs(cs - expected) <= 1e-4, "example 2 tail level");
  }
  return log.done();
}

Outcome bias_identity() {
  Log log;
  const auto ex2 = builtin_example(2);
  const double t = 0.5;
  const auto f_at = [&](double x, double y) { return ex2.f(x, y, t); };
  const auto f_coeff_at = [&](int p, int q) { return ex2.f_coeff(p, q, t); };
  const GridSpec g(16, 16);
  double worst_gamma = 0.0, worst_eta = 0.0;
  for (int p = 1; p <= 5; ++p)
    for (int q = 1; q <= 5; ++q) {
      worst_gamma = std::max(worst_gamma, std::abs(discretization_bias_direct(ex2.h, ex2.h_coeff, g, p, q) -
                                                   bias_tail_series(ex2.h_coeff, 16, 16, p, q, 8, 8)));
      worst_eta = std::max(worst_eta, std::abs(discretization_bias_direct(f_at, f_coeff_at, g, p, q) -
                                               bias_tail_series(f_coeff_at, 16, 16, p, q, 8, 8)));
    }
  log.note(fmt("max |direct - tail|: gamma %.3g, eta (t = %.1f) %.3g", worst_gamma, t, worst_eta));
  log.check(worst_gamma <= 1e-8, "gamma");
  log.check(worst_eta <= 1e-8, "eta");
  return log.done();
}

ExperimentConfig table_config(int example) {
  ExperimentConfig c;
  c.example_id = example;
  c.threads = worker_count();
  return c;
}

bool all_divergent(const RmseReport& r, std::size_t level) {
  return std::all_of(r.rows.begin(), r.rows.end(), [&](const TrialRow& row) { return row.classical[level].divergent; });
}

Outcome table(int example, double lo1, double hi1, double lo2, double hi2, double qbv1, double qbv2) {
  Log log;
  const RmseReport r = run_monte_carlo(table_config(example));
  const double t1 = r.truncated_avg[0].mean, t2 = r.truncated_avg[1].mean;
  const double q1 = r.qbv_avg[0].mean, q2 = r.qbv_avg[1].mean;
  log.note(fmt("truncated %.6g [%.4g, %.4g], %.6g [%.4g, %.4g]", t1, lo1, hi1, t2, lo2, hi2));
  log.note(fmt("QBV %.6g (ref %.4g), %.6g (ref %.4g)", q1, qbv1, q2, qbv2));
  log.note(fmt("classical mean log10 RMSE %.4g, %.4g", r.classical_avg[0].mean_log10, r.classical_avg[1].mean_log10));
  log.check(!r.truncated_avg[0].divergent && t1 >= lo1 && t1 <= hi1, "truncated, level 0.1");
  log.check(!r.truncated_avg[1].divergent && t2 >= lo2 && t2 <= hi2, "truncated, level 0.01");
  log.check(std::abs(q1 - qbv1) <= 0.15 * qbv1, "QBV, level 0.1");
  log.check(std::abs(q2 - qbv2) <= 0.15 * qbv2, "QBV, level 0.01");
  log.check(all_divergent(r, 0) && all_divergent(r, 1), "classical divergence");
  return log.done();
}

Outcome table1() { return table(1, 0.2, 0.9, 0.04, 0.12, 1.8160, 0.6540); }

Outcome table2() { return table(2, 0.3074 * 0.65, 0.3074 * 1.35, 0.1542 * 0.9, 0.1542 * 1.1, 0.3148, 0.1443); }

Outcome convergence() {
  Log log;
  double prev = INFINITY;
  for (int n : {21, 41, 81}) {
    ExperimentConfig c = table_config(1);
    c.n = c.m = n;
    c.noise_levels = {0.01};
    c.qbv_epsilons = {0.01};
    c.qbv_cap = c.classical_cap = 1;
    const RmseReport r = run_monte_carlo(c);
    const double avg = r.truncated_avg[0].mean;
    log.note(fmt("n = %d: %.6g", n, avg));
    log.check(!r.truncated_avg[0].divergent && avg <= prev * 1.15, fmt("n = %d not below 1.15 x previous", n));
    prev = avg;
  }
  return log.done();
}

Outcome illposed() {
  Log log;
  const auto rows = illposedness_demo(IllposedConfig{});
  double prev = -INFINITY;
  for (const auto& r : rows) {
    const double ratio = r.mean_h_norm_sq / r.reference_h_norm_sq;
    log.note(fmt("n = %d: E|h|^2 %.4g vs %.4g (ratio %.3g), log E|theta|^2 %.4g", r.n, r.mean_h_norm_sq,
                 r.reference_h_norm_sq, ratio, r.log_mean_theta_norm_sq));
    log.check(std::abs(ratio - 1.0) <= 0.3, fmt("h norm at n = %d", r.n));
    log.check(r.log_mean_theta_norm_sq > prev, fmt("theta norm not increasing at n = %d", r.n));
    prev = r.log_mean_theta_norm_sq;
  }
  return log.done();
}

Outcome stochastic() {
  Log log;
  NoiseSpec s;
  s.vartheta = 1.0;
  s.sigma = 1.0;
  s.seed = 2024;
  const GridSpec g(100, 100);
  const TimeGrid tg(1.0, 100);
  const auto xi = brownian_paths(s, g, tg);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 1; k < tg.size(); ++k) {
    double v = 0.0;
    for (double x : xi[k].flat()) v += x * x;
    v /= static_cast<double>(xi[k].size());
    num += tg.points()[k] * v;
    den += tg.points()[k] * tg.points()[k];
  }
  const double slope = num / den;
  log.note(fmt("Brownian variance slope %.4f", slope));
  log.check(std::abs(slope - 1.0) <= 0.1, "Brownian slope");

  const Matrix e = gaussian_field(s, GridSpec(300, 300));
  double mean = 0.0, var = 0.0;
  for (double x : e.flat()) mean += x;
  mean /= static_cast<double>(e.size());
  for (double x : e.flat()) var += (x - mean) * (x - mean);
  var /= static_cast<double>(e.size() - 1);
  log.note(fmt("Gaussian field mean %.4f, variance %.4f", mean, var));
  log.check(std::abs(mean) <= 0.02 && std::abs(var - 1.0) <= 0.05, "Gaussian moments");

  log.check(gaussian_field(s, g) == gaussian_field(s, g), "field determinism");

  ExperimentConfig c;
  c.trials = 6;
  c.threads = 1;
  const RmseReport serial = run_monte_carlo(c);
  c.threads = worker_count() > 1 ? worker_count() : 3;
  const RmseReport parallel = run_monte_carlo(c);
  bool same = serial.rows.size() == parallel.rows.size();
  for (std::size_t t = 0; same && t < serial.rows.size(); ++t) {
    for (std::size_t l = 0; l < 2; ++l) {
      same = same && serial.rows[t].truncated[l].rmse == parallel.rows[t].truncated[l].rmse &&
             serial.rows[t].qbv[l].rmse == parallel.rows[t].qbv[l].rmse &&
             serial.rows[t].classical[l].log10_rmse == parallel.rows[t].classical[l].log10_rmse;
    }
  }
  log.note(fmt("serial vs %d threads bit-identical: %s", c.threads, same ? "yes" : "no"));
  log.check(same, "parallel/serial equality");
  return log.done();
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "orthogonality suite", 10, orthogonality},
      {2, "quadrature anchors", 10, quadrature},
      {3, "noise-free roundtrip", 30, roundtrip},
      {4, "bias identity", 30, bias_identity},
      {5, "table 1 reproduction", 300, table1},
      {6, "table 2 reproduction", 300, table2},
      {7, "convergence trend", 900, convergence},
      {8, "ill-posedness demo", 60, illposed},
      {9, "stochastic contracts", 60, stochastic},
  };
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  if (argc > 1 && (only < 1 || only > 9)) {
    std::fprintf(stderr, "usage: %s [1-9]\n", argv[0]);
    return 2;
  }

  bool ok = true;
  for (const Criterion& c : all) {
    if (only && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = secs <= c.budget_s;
    const bool pass = o.pass && in_budget;
    std::printf("%s criterion %d (%s): %s [%.2f s, budget %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget_s, in_budget ? "" : ", over budget");
    std::fflush(stdout);
    ok = ok && pass;
  }
  return ok ? 0 : 1;
}
