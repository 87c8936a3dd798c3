#include "bheat/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <thread>

#include "bheat/csv.hpp"
#include "bheat/errors.hpp"

namespace bheat {

namespace {

constexpr double kLn10 = 2.302585092994045684;

// Everything a trial needs that does not depend on the seed.
struct TrialContext {
  ProblemInstance instance;
  GridSpec grid;
  TimeGrid time_grid;
  Matrix truth;
  int qbv_cap;
  int classical_cap;
};

TrialContext make_context(const ExperimentConfig& cfg) {
  ProblemInstance inst = experiment_instance(cfg);
  GridSpec grid(cfg.n, cfg.m);
  TimeGrid tg(cfg.T, cfg.time_segments);
  Matrix truth = inst.sample_theta(grid);
  const int cap_limit = std::min(cfg.n, cfg.m) - 1;
  return {std::move(inst), grid, tg, std::move(truth), std::min(cfg.qbv_cap, cap_limit),
          std::min(cfg.classical_cap, cap_limit)};
}

MethodScore score_from_log(double log_rmse_value, bool flagged) {
  MethodScore s;
  s.log10_rmse = log_rmse_value / kLn10;
  s.divergent = flagged || s.log10_rmse >= kDivergenceLog10;
  s.rmse = std::exp(log_rmse_value);
  return s;
}

TrialRow trial(const ExperimentConfig& cfg, const TrialContext& ctx, int trial_index) {
  TrialRow row;
  row.run = trial_index + 1;
  row.seed = cfg.trial_seed(trial_index);
  for (std::size_t l = 0; l < cfg.noise_levels.size(); ++l) {
    const NoiseSpec spec = NoiseSpec::from_level(cfg.noise_levels[l], cfg.noise_convention, row.seed);
    const NoisyDataset ds = synthesize_dataset(ctx.instance, ctx.grid, ctx.time_grid, spec);

    try {
      const Estimate est = truncated_estimator(ds, ctx.instance.profile, cfg.truncation, cfg.log_cap);
      const double r = rmse(est.field(ctx.grid), ctx.truth);
      row.truncated.push_back({r, std::log10(r), false});
    } catch (const BlowUpError& e) {
      row.truncated.push_back({std::numeric_limits<double>::infinity(), e.log_magnitude() / kLn10, true});
    }

    const Estimate qbv = qbv_estimator(ds, ctx.instance.profile, cfg.qbv_epsilons[l], ctx.qbv_cap, ctx.qbv_cap);
    row.qbv.push_back(score_from_log(log_rmse(qbv, ctx.grid, ctx.truth), false));

    const Estimate cs =
        classical_estimator(ds, ctx.instance.profile, ctx.classical_cap, ctx.classical_cap, cfg.log_cap);
    row.classical.push_back(score_from_log(log_rmse(cs, ctx.grid, ctx.truth), cs.blown_up));
  }
  return row;
}

std::vector<MethodAverage> averages(const std::vector<TrialRow>& rows, std::vector<MethodScore> TrialRow::*member,
                                    std::size_t columns) {
  std::vector<MethodAverage> out(columns);
  for (std::size_t c = 0; c < columns; ++c) {
    std::size_t finite = 0;
    for (const TrialRow& r : rows) {
      const MethodScore& s = (r.*member)[c];
      out[c].mean_log10 += s.log10_rmse / static_cast<double>(rows.size());
      out[c].divergent = out[c].divergent || s.divergent;
      if (std::isfinite(s.rmse)) {
        out[c].mean += s.rmse;
        ++finite;
      }
    }
    out[c].mean = finite ? out[c].mean / static_cast<double>(finite) : std::numeric_limits<double>::infinity();
  }
  return out;
}

std::string level_tag(double v) { return csv::sig6(v); }

// Scientific form from a base-10 logarithm, e.g. 466.957 -> "9.0573E+466".
std::string from_log10(double l) {
  if (!std::isfinite(l)) return l > 0 ? "inf" : "0";
  const double e = std::floor(l);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4fE%+d", std::pow(10.0, l - e), static_cast<int>(e));
  return buf;
}

std::string score_text(const MethodScore& s) {
  if (s.divergent || !std::isfinite(s.rmse)) return from_log10(s.log10_rmse);
  return csv::sig6(s.rmse);
}

std::string average_text(const MethodAverage& a) { return a.divergent ? "divergence" : csv::sig6(a.mean); }

double log_sum_exp(const std::vector<double>& logs) {
  const double mx = *std::max_element(logs.begin(), logs.end());
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double v : logs) s += std::exp(v - mx);
  return mx + std::log(s);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (example_id != 1 && example_id != 2) throw ConfigError("example_id must be 1 or 2");
  if (n < 2 || m < 2) throw ConfigError("n and m must be >= 2");
  if (!(T > 0.0)) throw ConfigError("T must be positive");
  if (time_segments < 6) throw ConfigError("time_segments must be >= 6");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (noise_levels.empty()) throw ConfigError("noise_levels must not be empty");
  for (double s : noise_levels)
    if (!(s >= 0.0)) throw ConfigError("noise levels must be non-negative");
  if (qbv_epsilons.size() != noise_levels.size()) {
    throw ConfigError("qbv_epsilons needs one value per noise level");
  }
  for (double e : qbv_epsilons)
    if (!(e > 0.0)) throw ConfigError("qbv epsilons must be positive");
  if (qbv_cap < 1 || classical_cap < 1) throw ConfigError("mode caps must be >= 1");
  if (!(log_cap > 0.0)) throw ConfigError("log_cap must be positive");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (truncation.mode == TruncationRule::Mode::manual && (truncation.N < 1 || truncation.M < 1)) {
    throw ConfigError("manual truncation needs N, M >= 1");
  }
}

ProblemInstance experiment_instance(const ExperimentConfig& config) {
  ProblemInstance inst = builtin_example(config.example_id);
  if (config.T != inst.T) throw ConfigError("built-in examples are defined for T = 1");
  return inst;
}

TrialRow run_single_trial(const ExperimentConfig& config, int trial_index) {
  config.validate();
  return trial(config, make_context(config), trial_index);
}

RmseReport run_monte_carlo(const ExperimentConfig& config) {
  config.validate();
  const TrialContext ctx = make_context(config);

  RmseReport report;
  report.config = config;
  report.rows.resize(static_cast<std::size_t>(config.trials));

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int t = next++; t < config.trials; t = next++) report.rows[static_cast<std::size_t>(t)] = trial(config, ctx, t);
  };
  const int workers = std::min(config.threads, config.trials);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  const std::size_t levels = config.noise_levels.size();
  report.truncated_avg = averages(report.rows, &TrialRow::truncated, levels);
  report.qbv_avg = averages(report.rows, &TrialRow::qbv, levels);
  report.classical_avg = averages(report.rows, &TrialRow::classical, levels);
  return report;
}

void write_table_csv(const RmseReport& report, const std::filesystem::path& path) {
  const auto& cfg = report.config;
  csv::Table t;
  t.header.push_back("run");
  for (double s : cfg.noise_levels) t.header.push_back("truncated_s2=" + level_tag(s));
  for (double e : cfg.qbv_epsilons) t.header.push_back("qbv_eps=" + level_tag(e));
  for (double s : cfg.noise_levels) t.header.push_back("classical_s2=" + level_tag(s));
  for (double s : cfg.noise_levels) t.header.push_back("classical_log10_s2=" + level_tag(s));
  t.header.push_back("seed");

  for (const TrialRow& r : report.rows) {
    std::vector<std::string> row{std::to_string(r.run)};
    for (const auto& s : r.truncated) row.push_back(score_text(s));
    for (const auto& s : r.qbv) row.push_back(score_text(s));
    for (const auto& s : r.classical) row.push_back(score_text(s));
    for (const auto& s : r.classical) row.push_back(csv::sig6(s.log10_rmse));
    row.push_back(std::to_string(r.seed));
    t.rows.push_back(std::move(row));
  }

  std::vector<std::string> avg{"Average"};
  for (const auto& a : report.truncated_avg) avg.push_back(average_text(a));
  for (const auto& a : report.qbv_avg) avg.push_back(average_text(a));
  for (const auto& a : report.classical_avg) avg.push_back(average_text(a));
  for (const auto& a : report.classical_avg) avg.push_back(csv::sig6(a.mean_log10));
  avg.emplace_back();
  t.rows.push_back(std::move(avg));
  csv::write(path, t);
}

void write_plot_data(const std::vector<RmseReport>& reports, const std::filesystem::path& path) {
  csv::Table t{{"n", "sigma2", "method", "avg_rmse"}, {}};
  for (const RmseReport& r : reports) {
    const auto n = std::to_string(r.config.n);
    for (std::size_t l = 0; l < r.config.noise_levels.size(); ++l) {
      const auto s2 = level_tag(r.config.noise_levels[l]);
      t.rows.push_back({n, s2, "truncated", average_text(r.truncated_avg[l])});
      t.rows.push_back({n, s2, "qbv", average_text(r.qbv_avg[l])});
      t.rows.push_back({n, s2, "classical", average_text(r.classical_avg[l])});
    }
  }
  csv::write(path, t);
}

std::vector<IllposedRow> illposedness_demo(const IllposedConfig& cfg) {
  if (cfg.trials < 1) throw ConfigError("illposedness_demo: trials must be >= 1");
  if (!(cfg.T > 0.0)) throw ConfigError("illposedness_demo: T must be positive");
  if (!(cfg.vartheta >= 0.0) || !(cfg.sigma_scale >= 0.0)) {
    throw ConfigError("illposedness_demo: noise amplitudes must be non-negative");
  }
  const DiffusionProfile profile = DiffusionProfile::constant(1.0, cfg.T);
  const ProblemInstance zero = modal_problem(profile, {}, {});
  const TimeGrid tg(cfg.T, cfg.time_segments);

  std::vector<IllposedRow> out;
  for (int n : cfg.sizes) {
    if (n < 2) throw ConfigError("illposedness_demo: sizes must be >= 2");
    const GridSpec grid(n, n);
    double h_sum = 0.0;
    std::vector<double> log_theta;
    for (int t = 0; t < cfg.trials; ++t) {
      NoiseSpec spec;
      spec.seed = cfg.seed ^ static_cast<std::uint64_t>(t);
      spec.sigma = cfg.sigma_scale / n;  // N(0, 1/(nm)) with m = n
      spec.vartheta = cfg.vartheta;
      const NoisyDataset ds = synthesize_dataset(zero, grid, tg, spec);

      const CoefficientField h_bar = SineTransform(grid, n - 1, n - 1).forward(ds.d);
      for (double c : h_bar.values().flat()) h_sum += c * c;

      const Estimate th =
          classical_estimator(ds, profile, n - 1, n - 1, std::numeric_limits<double>::infinity());
      double ss = 0.0;
      for (double c : th.scaled.flat()) ss += c * c;
      log_theta.push_back(2.0 * th.log_scale + std::log(ss));
    }
    IllposedRow row;
    row.n = n;
    row.mean_h_norm_sq = h_sum / cfg.trials;
    row.reference_h_norm_sq = static_cast<double>(n - 1) * (n - 1) / (static_cast<double>(n) * n * n * n);
    row.log_mean_theta_norm_sq = log_sum_exp(log_theta) - std::log(static_cast<double>(cfg.trials));
    out.push_back(row);
  }
  return out;
}

std::vector<BiasRow> bias_study(int example_id, const std::vector<int>& sizes, int modes, double t) {
  const ProblemInstance inst = builtin_example(example_id);
  if (!(t >= 0.0 && t <= inst.T)) throw ConfigError("bias_study: t outside [0, T]");
  if (modes < 1) throw ConfigError("bias_study: modes must be >= 1");
  const auto f_at = [&inst, t](double x, double y) { return inst.f(x, y, t); };
  const auto f_coeff_at = [&inst, t](int p, int q) { return inst.f_coeff(p, q, t); };

  std::vector<BiasRow> out;
  for (int n : sizes) {
    if (n < 2) throw ConfigError("bias_study: sizes must be >= 2");
    const GridSpec grid(n, n);
    const int top = std::min(modes, n - 1);
    for (int p = 1; p <= top; ++p) {
      for (int q = 1; q <= top; ++q) {
        out.push_back({n, p, q, discretization_bias_direct(inst.h, inst.h_coeff, grid, p, q),
                       discretization_bias_direct(f_at, f_coeff_at, grid, p, q)});
      }
    }
  }
  return out;
}

}  // namespace bheat
