// bheat: command-line front end for the backward heat estimators.
//
//   bheat [--config FILE] [shared options] <simulate|estimate|benchmark|demo-illposed|bias-study> [options]
//
// Shared options are also accepted after the subcommand name. Exit codes:
// 0 success, 2 configuration error, 3 unexpected numerical blow-up.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bheat/csv.hpp"
#include "bheat/errors.hpp"
#include "bheat/experiment.hpp"
#include "bheat/kernels.hpp"

namespace fs = std::filesystem;
using namespace bheat;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitBlowUp = 3;

struct CliState {
  ExperimentConfig cfg;
  std::string noise_convention = "paper";
  std::string truncation = "numeric";
  std::string kernels;

  // simulate / estimate
  double level = -1.0;
  std::int64_t seed = -1;
  std::string dataset_dir;
  double epsilon = -1.0;

  // benchmark / studies
  std::vector<int> sizes;
  int modes = 5;
  double at_time = 0.5;
  double demo_T = 0.05;
  double demo_vartheta = 0.1;
};

void finalize(CliState& st) {
  st.cfg.noise_convention = parse_noise_convention(st.noise_convention);
  st.cfg.truncation.mode = parse_truncation_mode(st.truncation);
  if (!st.kernels.empty()) {
    const auto isa = st.kernels == "scalar" ? kernels::Isa::scalar
                     : st.kernels == "avx2" ? kernels::Isa::avx2
                                            : throw ConfigError("kernels must be scalar or avx2");
    if (!kernels::select(isa)) throw ConfigError("requested kernels are not available on this CPU");
  }
  st.cfg.validate();
}

NoisyDataset make_dataset(const CliState& st) {
  const auto& cfg = st.cfg;
  const double level = st.level >= 0.0 ? st.level : cfg.noise_levels.front();
  const auto seed = st.seed >= 0 ? static_cast<std::uint64_t>(st.seed) : cfg.base_seed;
  const ProblemInstance inst = experiment_instance(cfg);
  return synthesize_dataset(inst, GridSpec(cfg.n, cfg.m), TimeGrid(cfg.T, cfg.time_segments),
                            NoiseSpec::from_level(level, cfg.noise_convention, seed));
}

void write_estimate(const Estimate& est, const GridSpec& grid, const fs::path& dir, const std::string& name) {
  csv::Table coeffs{{"p", "q", "value", "log10_abs"}, {}};
  for (int p = 1; p <= est.P(); ++p) {
    for (int q = 1; q <= est.Q(); ++q) {
      const double s = est.scaled(static_cast<std::size_t>(p - 1), static_cast<std::size_t>(q - 1));
      const double l10 = s == 0.0 ? -INFINITY : (est.log_scale + std::log(std::abs(s))) / std::log(10.0);
      const double v = est.log_scale == 0.0 ? s : std::copysign(INFINITY, s);
      coeffs.rows.push_back({std::to_string(p), std::to_string(q), csv::full(v), csv::full(l10)});
    }
  }
  csv::write(dir / (name + "_coefficients.csv"), coeffs);

  if (est.log_scale != 0.0) return;
  const Matrix field = est.field(grid);
  csv::Table values{{"i", "j", "x", "y", "value"}, {}};
  for (int i = 0; i < grid.n(); ++i)
    for (int j = 0; j < grid.m(); ++j)
      values.rows.push_back({std::to_string(i), std::to_string(j), csv::full(grid.nodes_x()[i]),
                             csv::full(grid.nodes_y()[j]), csv::full(field(i, j))});
  csv::write(dir / (name + "_field.csv"), values);
}

int cmd_simulate(const CliState& st) {
  const NoisyDataset ds = make_dataset(st);
  const fs::path dir = st.dataset_dir.empty() ? fs::path(st.cfg.output_dir) / "dataset" : fs::path(st.dataset_dir);
  write_dataset(ds, dir);
  std::cout << "dataset written to " << dir.string() << " (n=" << ds.grid.n() << ", m=" << ds.grid.m()
            << ", K=" << ds.time_grid.segments() << ", sigma=" << ds.spec.sigma << ", vartheta=" << ds.spec.vartheta
            << ", seed=" << ds.spec.seed << ")\n";
  return 0;
}

int cmd_estimate(const CliState& st) {
  const auto& cfg = st.cfg;
  const NoisyDataset ds = st.dataset_dir.empty() ? make_dataset(st) : read_dataset(st.dataset_dir);
  const ProblemInstance inst = experiment_instance(cfg);
  const int cap_limit = std::min(ds.grid.n(), ds.grid.m()) - 1;
  const double eps = st.epsilon > 0.0 ? st.epsilon : cfg.qbv_epsilons.front();
  const fs::path out(cfg.output_dir);
  fs::create_directories(out);
  const Matrix truth = inst.sample_theta(ds.grid);

  const Estimate trunc = truncated_estimator(ds, inst.profile, cfg.truncation, cfg.log_cap);
  const Estimate qbv = qbv_estimator(ds, inst.profile, eps, std::min(cfg.qbv_cap, cap_limit),
                                     std::min(cfg.qbv_cap, cap_limit));
  const Estimate cs = classical_estimator(ds, inst.profile, std::min(cfg.classical_cap, cap_limit),
                                          std::min(cfg.classical_cap, cap_limit), cfg.log_cap);
  write_estimate(trunc, ds.grid, out, "truncated");
  write_estimate(qbv, ds.grid, out, "qbv");
  write_estimate(cs, ds.grid, out, "classical");

  std::printf("truncated  N=%d M=%d  RMSE=%.6g\n", trunc.P(), trunc.Q(), std::exp(log_rmse(trunc, ds.grid, truth)));
  std::printf("qbv        eps=%g     RMSE=%.6g\n", eps, std::exp(log_rmse(qbv, ds.grid, truth)));
  std::printf("classical  log10 RMSE=%.6g%s\n", log_rmse(cs, ds.grid, truth) / std::log(10.0),
              cs.blown_up ? "  (blow-up)" : "");
  return 0;
}

void print_report(const RmseReport& r) {
  std::printf("n=%d m=%d trials=%d\n", r.config.n, r.config.m, r.config.trials);
  for (std::size_t l = 0; l < r.config.noise_levels.size(); ++l) {
    auto text = [](const MethodAverage& a) {
      char buf[64];
      if (a.divergent) return std::string("divergence");
      std::snprintf(buf, sizeof buf, "%.6g", a.mean);
      return std::string(buf);
    };
    std::printf("  s2=%-8g truncated=%-12s qbv(eps=%g)=%-12s classical=%s (mean log10 %.4g)\n",
                r.config.noise_levels[l], text(r.truncated_avg[l]).c_str(), r.config.qbv_epsilons[l],
                text(r.qbv_avg[l]).c_str(), text(r.classical_avg[l]).c_str(), r.classical_avg[l].mean_log10);
  }
}

int cmd_benchmark(const CliState& st) {
  const fs::path out(st.cfg.output_dir);
  fs::create_directories(out);
  std::vector<int> sizes = st.sizes;
  if (sizes.empty()) sizes.push_back(st.cfg.n);
  std::vector<RmseReport> reports;
  for (int n : sizes) {
    ExperimentConfig cfg = st.cfg;
    if (!st.sizes.empty()) cfg.n = cfg.m = n;
    reports.push_back(run_monte_carlo(cfg));
    const std::string name = sizes.size() == 1 ? "table.csv" : "table_n" + std::to_string(n) + ".csv";
    write_table_csv(reports.back(), out / name);
    print_report(reports.back());
  }
  write_plot_data(reports, out / "plot_data.csv");
  return 0;
}

int cmd_demo(const CliState& st) {
  IllposedConfig dc;
  if (!st.sizes.empty()) dc.sizes = st.sizes;
  dc.trials = st.cfg.trials;
  dc.seed = st.cfg.base_seed;
  dc.T = st.demo_T;
  dc.vartheta = st.demo_vartheta;
  dc.time_segments = st.cfg.time_segments;
  const auto rows = illposedness_demo(dc);

  const fs::path out(st.cfg.output_dir);
  fs::create_directories(out);
  csv::Table t{{"n", "mean_h_norm_sq", "reference_h_norm_sq", "log10_mean_theta_norm_sq"}, {}};
  for (const auto& r : rows) {
    const double l10 = r.log_mean_theta_norm_sq / std::log(10.0);
    t.rows.push_back({std::to_string(r.n), csv::sig6(r.mean_h_norm_sq), csv::sig6(r.reference_h_norm_sq),
                      csv::sig6(l10)});
    std::printf("n=m=%-4d E|h|^2=%-12.6g (n-1)^2/n^4=%-12.6g log10 E|theta|^2=%.6g\n", r.n, r.mean_h_norm_sq,
                r.reference_h_norm_sq, l10);
  }
  csv::write(out / "illposed.csv", t);
  return 0;
}

int cmd_bias(const CliState& st) {
  std::vector<int> sizes = st.sizes.empty() ? std::vector<int>{16, 32, 64, 128} : st.sizes;
  const auto rows = bias_study(st.cfg.example_id, sizes, st.modes, st.at_time);
  const fs::path out(st.cfg.output_dir);
  fs::create_directories(out);
  csv::Table t{{"n", "p", "q", "gamma", "eta"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({std::to_string(r.n), std::to_string(r.p), std::to_string(r.q), csv::full(r.gamma),
                      csv::full(r.eta)});
  csv::write(out / "bias.csv", t);
  std::cout << rows.size() << " rows written to " << (out / "bias.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Backward heat problem: truncated, QBV and classical reconstructions"};
  app.set_config("--config", "", "Flat key=value configuration file (keys as the long option names)");
  app.require_subcommand(1);
  app.fallthrough();

  CliState st;
  auto& c = st.cfg;
  app.add_option("--example_id", c.example_id, "Built-in problem (1 or 2)")->capture_default_str();
  app.add_option("--n", c.n, "Grid nodes in x")->capture_default_str();
  app.add_option("--m", c.m, "Grid nodes in y")->capture_default_str();
  app.add_option("--T", c.T, "Final time")->capture_default_str();
  app.add_option("--time_segments", c.time_segments, "Time grid segments K")->capture_default_str();
  app.add_option("--noise_levels", c.noise_levels, "Noise levels sigma^2")->capture_default_str()->delimiter(',');
  app.add_option("--noise_convention", st.noise_convention, "paper | equal-amplitude")->capture_default_str();
  app.add_option("--trials", c.trials, "Monte Carlo trials")->capture_default_str();
  app.add_option("--base_seed", c.base_seed, "Base seed; trial t uses base_seed XOR t")->capture_default_str();
  app.add_option("--truncation", st.truncation, "numeric | theorem | manual")->capture_default_str();
  app.add_option("--omega1", c.truncation.omega1, "Theorem-rule omega1 in (0,2)")->capture_default_str();
  app.add_option("--omega2", c.truncation.omega2, "Theorem-rule omega2 in (0,2)")->capture_default_str();
  app.add_option("--N", c.truncation.N, "Manual truncation N")->capture_default_str();
  app.add_option("--M", c.truncation.M, "Manual truncation M")->capture_default_str();
  app.add_option("--qbv_epsilons", c.qbv_epsilons, "QBV epsilon per noise level")->capture_default_str()->delimiter(',');
  app.add_option("--qbv_cap", c.qbv_cap, "QBV mode cap")->capture_default_str();
  app.add_option("--classical_cap", c.classical_cap, "Classical mode cap")->capture_default_str();
  app.add_option("--log_cap", c.log_cap, "Blow-up threshold for log|coefficient|")->capture_default_str();
  app.add_option("--threads", c.threads, "Worker threads for trials")->capture_default_str();
  app.add_option("--output_dir", c.output_dir, "Output directory")->capture_default_str();
  app.add_option("--kernels", st.kernels, "Force kernel set: scalar | avx2");

  auto* sim = app.add_subcommand("simulate", "Draw one noisy dataset and write it as CSV");
  sim->add_option("--level", st.level, "Noise level sigma^2 (default: first of noise_levels)");
  sim->add_option("--seed", st.seed, "Seed (default: base_seed)");
  sim->add_option("--dataset", st.dataset_dir, "Target directory (default: <output_dir>/dataset)");

  auto* est = app.add_subcommand("estimate", "Run the three estimators on one dataset");
  est->add_option("--dataset", st.dataset_dir, "Dataset directory written by simulate (default: draw one)");
  est->add_option("--level", st.level, "Noise level when drawing a dataset");
  est->add_option("--seed", st.seed, "Seed when drawing a dataset");
  est->add_option("--epsilon", st.epsilon, "QBV epsilon (default: first of qbv_epsilons)");

  auto* bench = app.add_subcommand("benchmark", "Monte Carlo RMSE tables");
  bench->add_option("--sizes", st.sizes, "Run n = m over these sizes (plot data)")->delimiter(',');

  auto* demo = app.add_subcommand("demo-illposed", "Norm growth of the classical inversion on pure noise");
  demo->add_option("--sizes", st.sizes, "Grid sizes n = m")->delimiter(',');
  demo->add_option("--demo_T", st.demo_T, "Final time of the demo")->capture_default_str();
  demo->add_option("--vartheta", st.demo_vartheta, "Source noise amplitude")->capture_default_str();

  auto* bias = app.add_subcommand("bias-study", "Discretization bias gamma / eta versus n");
  bias->add_option("--sizes", st.sizes, "Grid sizes n = m")->delimiter(',');
  bias->add_option("--modes", st.modes, "Largest p, q")->capture_default_str();
  bias->add_option("--t", st.at_time, "Time for eta")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    finalize(st);
    if (sim->parsed()) return cmd_simulate(st);
    if (est->parsed()) return cmd_estimate(st);
    if (bench->parsed()) return cmd_benchmark(st);
    if (demo->parsed()) return cmd_demo(st);
    if (bias->parsed()) return cmd_bias(st);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const BlowUpError& e) {
    std::cerr << "blow-up: " << e.what() << "\n";
    return kExitBlowUp;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
