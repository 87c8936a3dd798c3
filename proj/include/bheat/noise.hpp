#pragma once

// Observation noise for the two regression models
//   d_ij    = h(x_i, y_j) + sigma_ij eps_ij,        eps_ij ~ N(0, 1) i.i.d.
//   g_ij(t) = f(x_i, y_j, t) + vartheta xi_ij(t),   xi_ij standard Brownian motions.
//
// Every grid site owns independent random streams keyed on (seed, i, j, tag),
// so the draws do not depend on iteration order or on how work is split
// across threads.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bheat/heat_model.hpp"
#include "bheat/matrix.hpp"
#include "bheat/quadrature.hpp"
#include "bheat/spectral_basis.hpp"

namespace bheat {

/// How a single noise level s (the tables' "sigma^2") maps to (sigma, vartheta).
///   paper:           sigma = sqrt(s), vartheta = s
///   equal_amplitude: sigma = vartheta = sqrt(s)
enum class NoiseConvention { paper, equal_amplitude };

NoiseConvention parse_noise_convention(const std::string& text);
std::string to_string(NoiseConvention c);

struct NoiseSpec {
  double sigma = 0.0;
  double vartheta = 0.0;
  std::uint64_t seed = 0;
  /// Per-site standard deviations; replaces sigma when present.
  std::optional<Matrix> sigma_field;
  /// Exclusive upper bound for sigma_field entries.
  double v_max = std::numeric_limits<double>::infinity();

  static NoiseSpec from_level(double level, NoiseConvention convention, std::uint64_t seed);

  /// Throws ConfigError on negative levels or out-of-range sigma_field
  /// entries, ShapeError if sigma_field does not match the grid.
  void validate(const GridSpec& grid) const;

  double sigma_at(std::size_t i, std::size_t j) const {
    return sigma_field ? (*sigma_field)(i, j) : sigma;
  }
};

/// sigma_ij eps_ij on the grid.
Matrix gaussian_field(const NoiseSpec& spec, const GridSpec& grid);

/// Standard Brownian paths xi_ij sampled on the time grid: element k is the
/// n x m matrix of xi(t_k). xi(t_0) = 0 and increments are sqrt(dt) N(0, 1).
/// The amplitude vartheta is not applied here.
std::vector<Matrix> brownian_paths(const NoiseSpec& spec, const GridSpec& grid, const TimeGrid& time_grid);

struct NoisyDataset {
  GridSpec grid;
  TimeGrid time_grid;
  Matrix d;               // n x m
  std::vector<Matrix> g;  // K+1 slices, each n x m
  NoiseSpec spec;
};

NoisyDataset synthesize_dataset(const ProblemInstance& instance, const GridSpec& grid,
                                const TimeGrid& time_grid, const NoiseSpec& spec);

/// Replay layout inside `dir`:
///   d.csv     i,j,x,y,d        (0-based node indices)
///   g.csv     i,j,k,t,g        (long format, one row per site and time node)
///   meta.txt  key=value lines: n, m, T, K, sigma, vartheta, seed
/// Values are written with 17 significant digits so a round trip is exact.
void write_dataset(const NoisyDataset& dataset, const std::filesystem::path& dir);
NoisyDataset read_dataset(const std::filesystem::path& dir);

}  // namespace bheat
