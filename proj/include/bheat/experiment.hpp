#pragma once

// Monte Carlo harness: per trial, one dataset per noise level is drawn with
// seed = base_seed XOR trial_index, and the truncated, QBV and classical
// estimates are scored by RMSE against the true initial field on the grid.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bheat/estimators.hpp"
#include "bheat/heat_model.hpp"
#include "bheat/noise.hpp"

namespace bheat {

/// An RMSE at or above 10^50 is reported as divergence.
inline constexpr double kDivergenceLog10 = 50.0;

struct ExperimentConfig {
  int example_id = 1;
  int n = 21;
  int m = 21;
  double T = 1.0;
  int time_segments = 100;
  std::vector<double> noise_levels{0.1, 0.01};
  NoiseConvention noise_convention = NoiseConvention::paper;
  int trials = 30;
  std::uint64_t base_seed = 1;
  TruncationRule truncation;
  /// One epsilon per noise level, applied to that level's dataset.
  std::vector<double> qbv_epsilons{0.1, 0.01};
  int qbv_cap = 20;
  int classical_cap = 20;
  double log_cap = kDefaultLogCap;
  int threads = 1;
  std::string output_dir = ".";

  /// Throws ConfigError on any inconsistency.
  void validate() const;
  std::uint64_t trial_seed(int trial_index) const {
    return base_seed ^ static_cast<std::uint64_t>(trial_index);
  }
};

/// One score. For the classical method `log10_rmse` is always filled, since
/// its values routinely exceed double range.
struct MethodScore {
  double rmse = 0.0;
  double log10_rmse = 0.0;
  bool divergent = false;
};

struct TrialRow {
  int run = 0;  // 1-based
  std::uint64_t seed = 0;
  std::vector<MethodScore> truncated;  // per noise level
  std::vector<MethodScore> qbv;        // per epsilon
  std::vector<MethodScore> classical;  // per noise level
};

struct MethodAverage {
  double mean = 0.0;        // arithmetic mean of per-trial RMSE (finite trials only)
  double mean_log10 = 0.0;  // mean of log10 RMSE
  bool divergent = false;   // any trial flagged
};

struct RmseReport {
  ExperimentConfig config;
  std::vector<TrialRow> rows;
  std::vector<MethodAverage> truncated_avg;
  std::vector<MethodAverage> qbv_avg;
  std::vector<MethodAverage> classical_avg;
};

/// Instance used by a config (built-in example by id).
ProblemInstance experiment_instance(const ExperimentConfig& config);

TrialRow run_single_trial(const ExperimentConfig& config, int trial_index);

/// All trials, split over config.threads workers. Output does not depend on
/// the thread count.
RmseReport run_monte_carlo(const ExperimentConfig& config);

/// Table layout: run, truncated per level, QBV per epsilon, classical per
/// level, classical log10 side columns, seed. Last row is "Average"; a
/// flagged method prints "divergence" there. 6 significant digits.
void write_table_csv(const RmseReport& report, const std::filesystem::path& path);

/// Long format n,sigma2,method,avg_rmse for every report (one per grid size).
void write_plot_data(const std::vector<RmseReport>& reports, const std::filesystem::path& path);

struct IllposedConfig {
  std::vector<int> sizes{4, 6, 8};
  int trials = 30;
  std::uint64_t seed = 1;
  double T = 0.05;
  double vartheta = 0.1;
  /// Multiplies the N(0, 1/(nm)) final-data noise; 0 switches it off.
  double sigma_scale = 1.0;
  int time_segments = 100;
};

struct IllposedRow {
  int n = 0;
  double mean_h_norm_sq = 0.0;       // Monte Carlo E||h-bar||^2
  double reference_h_norm_sq = 0.0;  // (n-1)^2 / n^4
  double log_mean_theta_norm_sq = 0.0;  // natural log of Monte Carlo E||theta-bar||^2
};

/// Pure-noise data (h = f = 0, a = 1) on n = m grids: norms of the
/// trigonometric-regression final data and of its classical inversion over
/// all modes below n.
std::vector<IllposedRow> illposedness_demo(const IllposedConfig& config);

struct BiasRow {
  int n = 0;
  int p = 0;
  int q = 0;
  double gamma = 0.0;
  double eta = 0.0;
};

/// gamma and eta (at time t) of a built-in example for n = m in `sizes`
/// and modes p, q <= modes.
std::vector<BiasRow> bias_study(int example_id, const std::vector<int>& sizes, int modes, double t);

}  // namespace bheat
