#include "bheat/noise.hpp"

#include <cmath>
#include <random>
#include <string>

#include "bheat/csv.hpp"
#include "bheat/errors.hpp"

namespace bheat {

namespace {

enum class StreamTag : std::uint32_t { final_data = 1, source = 2 };

// Independent generator for one (seed, site, purpose) key.
std::mt19937_64 site_stream(std::uint64_t seed, std::size_t i, std::size_t j, StreamTag tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                    static_cast<std::uint32_t>(tag)};
  return std::mt19937_64(seq);
}

}  // namespace

NoiseConvention parse_noise_convention(const std::string& text) {
  if (text == "paper") return NoiseConvention::paper;
  if (text == "equal-amplitude" || text == "equal_amplitude") return NoiseConvention::equal_amplitude;
  throw ConfigError("unknown noise convention '" + text + "' (expected paper or equal-amplitude)");
}

std::string to_string(NoiseConvention c) {
  return c == NoiseConvention::paper ? "paper" : "equal-amplitude";
}

NoiseSpec NoiseSpec::from_level(double level, NoiseConvention convention, std::uint64_t seed) {
  if (!(level >= 0.0)) throw ConfigError("noise level must be non-negative");
  NoiseSpec spec;
  spec.seed = seed;
  spec.sigma = std::sqrt(level);
  spec.vartheta = convention == NoiseConvention::paper ? level : std::sqrt(level);
  return spec;
}

void NoiseSpec::validate(const GridSpec& grid) const {
  if (!(sigma >= 0.0)) throw ConfigError("sigma must be non-negative");
  if (!(vartheta >= 0.0)) throw ConfigError("vartheta must be non-negative");
  if (!sigma_field) return;
  if (sigma_field->rows() != static_cast<std::size_t>(grid.n()) ||
      sigma_field->cols() != static_cast<std::size_t>(grid.m())) {
    throw ShapeError("sigma_field must be n x m");
  }
  for (double s : sigma_field->flat()) {
    if (!(s >= 0.0 && s < v_max)) throw ConfigError("sigma_field entries must lie in [0, v_max)");
  }
}

Matrix gaussian_field(const NoiseSpec& spec, const GridSpec& grid) {
  spec.validate(grid);
  const auto n = static_cast<std::size_t>(grid.n());
  const auto m = static_cast<std::size_t>(grid.m());
  Matrix out(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double s = spec.sigma_at(i, j);
      if (s == 0.0) continue;
      auto gen = site_stream(spec.seed, i, j, StreamTag::final_data);
      std::normal_distribution<double> normal;
      out(i, j) = s * normal(gen);
    }
  }
  return out;
}

std::vector<Matrix> brownian_paths(const NoiseSpec& spec, const GridSpec& grid, const TimeGrid& time_grid) {
  const auto n = static_cast<std::size_t>(grid.n());
  const auto m = static_cast<std::size_t>(grid.m());
  const auto K = static_cast<std::size_t>(time_grid.segments());
  const auto t = time_grid.points();
  std::vector<Matrix> paths(K + 1, Matrix(n, m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      auto gen = site_stream(spec.seed, i, j, StreamTag::source);
      std::normal_distribution<double> normal;
      double xi = 0.0;
      for (std::size_t k = 1; k <= K; ++k) {
        xi += std::sqrt(t[k] - t[k - 1]) * normal(gen);
        paths[k](i, j) = xi;
      }
    }
  }
  return paths;
}

NoisyDataset synthesize_dataset(const ProblemInstance& instance, const GridSpec& grid,
                                const TimeGrid& time_grid, const NoiseSpec& spec) {
  spec.validate(grid);
  NoisyDataset ds{grid, time_grid, instance.sample_h(grid), {}, spec};

  const Matrix eps = gaussian_field(spec, grid);
  auto d = ds.d.flat();
  const auto e = eps.flat();
  for (std::size_t idx = 0; idx < d.size(); ++idx) d[idx] += e[idx];

  ds.g.reserve(time_grid.size());
  std::vector<Matrix> xi;
  if (spec.vartheta != 0.0) xi = brownian_paths(spec, grid, time_grid);
  for (std::size_t k = 0; k < time_grid.size(); ++k) {
    Matrix slice = instance.sample_f(grid, time_grid.points()[k]);
    if (!xi.empty()) {
      auto s = slice.flat();
      const auto x = xi[k].flat();
      for (std::size_t idx = 0; idx < s.size(); ++idx) s[idx] += spec.vartheta * x[idx];
    }
    ds.g.push_back(std::move(slice));
  }
  return ds;
}

void write_dataset(const NoisyDataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto n = static_cast<std::size_t>(ds.grid.n());
  const auto m = static_cast<std::size_t>(ds.grid.m());

  csv::Table d{{"i", "j", "x", "y", "d"}, {}};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      d.rows.push_back({std::to_string(i), std::to_string(j), csv::full(ds.grid.nodes_x()[i]),
                        csv::full(ds.grid.nodes_y()[j]), csv::full(ds.d(i, j))});
  csv::write(dir / "d.csv", d);

  csv::Table g{{"i", "j", "k", "t", "g"}, {}};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < ds.g.size(); ++k)
        g.rows.push_back({std::to_string(i), std::to_string(j), std::to_string(k),
                          csv::full(ds.time_grid.points()[k]), csv::full(ds.g[k](i, j))});
  csv::write(dir / "g.csv", g);

  csv::write_kv(dir / "meta.txt", {{"n", std::to_string(n)},
                                   {"m", std::to_string(m)},
                                   {"T", csv::full(ds.time_grid.horizon())},
                                   {"K", std::to_string(ds.time_grid.segments())},
                                   {"sigma", csv::full(ds.spec.sigma)},
                                   {"vartheta", csv::full(ds.spec.vartheta)},
                                   {"seed", std::to_string(ds.spec.seed)}});
}

NoisyDataset read_dataset(const std::filesystem::path& dir) {
  const auto meta = csv::read_kv(dir / "meta.txt");
  auto need = [&](const char* key) {
    const auto it = meta.find(key);
    if (it == meta.end()) throw ConfigError(std::string("dataset meta.txt lacks key '") + key + "'");
    return it->second;
  };
  const GridSpec grid(std::stoi(need("n")), std::stoi(need("m")));
  const TimeGrid time_grid(std::stod(need("T")), std::stoi(need("K")));
  NoiseSpec spec;
  spec.sigma = std::stod(need("sigma"));
  spec.vartheta = std::stod(need("vartheta"));
  spec.seed = std::stoull(need("seed"));

  const auto n = static_cast<std::size_t>(grid.n());
  const auto m = static_cast<std::size_t>(grid.m());
  NoisyDataset ds{grid, time_grid, Matrix(n, m), std::vector<Matrix>(time_grid.size(), Matrix(n, m)), spec};

  auto index = [](const std::string& s, std::size_t limit, const char* what) {
    const auto v = std::stoul(s);
    if (v >= limit) throw ShapeError(std::string("dataset index out of range: ") + what);
    return static_cast<std::size_t>(v);
  };

  const auto d = csv::read(dir / "d.csv");
  const auto di = d.column("i"), dj = d.column("j"), dv = d.column("d");
  if (d.rows.size() != n * m) throw ShapeError("d.csv: expected n*m rows");
  for (const auto& r : d.rows) ds.d(index(r[di], n, "i"), index(r[dj], m, "j")) = std::stod(r[dv]);

  const auto g = csv::read(dir / "g.csv");
  const auto gi = g.column("i"), gj = g.column("j"), gk = g.column("k"), gv = g.column("g");
  if (g.rows.size() != n * m * time_grid.size()) throw ShapeError("g.csv: expected n*m*(K+1) rows");
  for (const auto& r : g.rows) {
    ds.g[index(r[gk], time_grid.size(), "k")](index(r[gi], n, "i"), index(r[gj], m, "j")) = std::stod(r[gv]);
  }
  return ds;
}

}  // namespace bheat
