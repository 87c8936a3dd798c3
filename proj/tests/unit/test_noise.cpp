#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "bheat/errors.hpp"
#include "bheat/noise.hpp"

using namespace bheat;

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments moments(std::span<const double> v) {
  Moments m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  for (double x : v) m.var += (x - m.mean) * (x - m.mean);
  m.var /= static_cast<double>(v.size() - 1);
  return m;
}

NoiseSpec spec_with(double sigma, double vartheta, std::uint64_t seed) {
  NoiseSpec s;
  s.sigma = sigma;
  s.vartheta = vartheta;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("noise level conventions") {
  const auto paper = NoiseSpec::from_level(0.1, NoiseConvention::paper, 3);
  CHECK(paper.sigma == doctest::Approx(std::sqrt(0.1)));
  CHECK(paper.vartheta == doctest::Approx(0.1));
  CHECK(paper.seed == 3);
  const auto eq = NoiseSpec::from_level(0.1, NoiseConvention::equal_amplitude, 3);
  CHECK(eq.sigma == doctest::Approx(std::sqrt(0.1)));
  CHECK(eq.vartheta == doctest::Approx(std::sqrt(0.1)));
  CHECK(parse_noise_convention("paper") == NoiseConvention::paper);
  CHECK(parse_noise_convention("equal-amplitude") == NoiseConvention::equal_amplitude);
  CHECK(to_string(NoiseConvention::equal_amplitude) == "equal-amplitude");
  CHECK_THROWS_AS(parse_noise_convention("loud"), ConfigError);
  CHECK_THROWS_AS(NoiseSpec::from_level(-0.1, NoiseConvention::paper, 0), ConfigError);
}

TEST_CASE("gaussian_field: zero sigma, determinism, moments") {
  const GridSpec small(10, 12);
  const Matrix z = gaussian_field(spec_with(0.0, 0.0, 9), small);
  for (double v : z.flat()) CHECK(v == 0.0);

  CHECK(gaussian_field(spec_with(1.0, 0.0, 9), small) == gaussian_field(spec_with(1.0, 0.0, 9), small));
  CHECK_FALSE(gaussian_field(spec_with(1.0, 0.0, 9), small) == gaussian_field(spec_with(1.0, 0.0, 10), small));

  const GridSpec big(200, 200);
  const Matrix e = gaussian_field(spec_with(1.0, 0.0, 2024), big);
  const auto m = moments(e.flat());
  CHECK(std::abs(m.mean) < 4.0 / 200.0);
  CHECK(std::abs(m.var - 1.0) < 0.1);
}

TEST_CASE("per-site streams do not depend on grid extent or traversal") {
  const auto spec = spec_with(1.0, 1.0, 77);
  const Matrix a = gaussian_field(spec, GridSpec(6, 9));
  const Matrix b = gaussian_field(spec, GridSpec(15, 11));
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 9; ++j) CHECK(a(i, j) == b(i, j));

  const TimeGrid tg(1.0, 20);
  const auto pa = brownian_paths(spec, GridSpec(4, 4), tg);
  const auto pb = brownian_paths(spec, GridSpec(8, 5), tg);
  for (std::size_t k = 0; k < tg.size(); ++k)
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) CHECK(pa[k](i, j) == pb[k](i, j));
}

TEST_CASE("sigma_field validation and use") {
  const GridSpec g(3, 2);
  NoiseSpec s = spec_with(0.0, 0.0, 1);
  s.sigma_field = Matrix(3, 2, 0.5);
  s.v_max = 1.0;
  const Matrix half = gaussian_field(s, g);
  s.sigma_field = Matrix(3, 2, 1.0 - 1e-12);
  const Matrix unit = gaussian_field(s, g);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(unit(i, j) == doctest::Approx(2.0 * half(i, j) * (1.0 - 1e-12)));

  s.sigma_field = Matrix(3, 2, 1.0);
  CHECK_THROWS_AS(gaussian_field(s, g), ConfigError);
  s.sigma_field = Matrix(2, 3, 0.1);
  CHECK_THROWS_AS(gaussian_field(s, g), ShapeError);
  CHECK_THROWS_AS(gaussian_field(spec_with(-1.0, 0.0, 1), g), ConfigError);
}

TEST_CASE("Brownian paths: start at zero, variance t, covariance min(s, t)") {
  const GridSpec g(200, 200);
  const TimeGrid tg(1.0, 100);
  const auto xi = brownian_paths(spec_with(0.0, 1.0, 31), g, tg);
  REQUIRE(xi.size() == 101);
  for (double v : xi[0].flat()) CHECK(v == 0.0);

  const auto end = moments(xi[100].flat());
  CHECK(std::abs(end.var - 1.0) < 0.1);

  double cov = 0.0;
  const auto mid = xi[50].flat();
  const auto last = xi[100].flat();
  for (std::size_t idx = 0; idx < mid.size(); ++idx) cov += mid[idx] * last[idx];
  cov /= static_cast<double>(mid.size());
  CHECK(std::abs(cov - 0.5) < 0.05);
}

TEST_CASE("property: Brownian variance grows linearly in t") {
  const GridSpec g(100, 100);
  const TimeGrid tg(1.0, 100);
  const auto xi = brownian_paths(spec_with(0.0, 1.0, 5), g, tg);
  // Least-squares slope of var(xi(t_k)) against t_k through the origin.
  double num = 0.0, den = 0.0;
  for (std::size_t k = 1; k < tg.size(); k += 3) {
    double v = 0.0;
    for (double x : xi[k].flat()) v += x * x;
    v /= static_cast<double>(xi[k].size());
    num += tg.points()[k] * v;
    den += tg.points()[k] * tg.points()[k];
  }
  CHECK(std::abs(num / den - 1.0) < 0.1);
}

TEST_CASE("property: noise at distinct sites is uncorrelated across seeds") {
  const GridSpec g(3, 3);
  const int seeds = 1000;
  double s01 = 0.0, s00 = 0.0, s11 = 0.0;
  double s_far = 0.0, s22 = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const Matrix e = gaussian_field(spec_with(1.0, 0.0, static_cast<std::uint64_t>(s)), g);
    s01 += e(0, 0) * e(0, 1);
    s00 += e(0, 0) * e(0, 0);
    s11 += e(0, 1) * e(0, 1);
    s_far += e(0, 0) * e(2, 2);
    s22 += e(2, 2) * e(2, 2);
  }
  CHECK(std::abs(s01 / std::sqrt(s00 * s11)) < 5.0 / std::sqrt(1000.0));
  CHECK(std::abs(s_far / std::sqrt(s00 * s22)) < 5.0 / std::sqrt(1000.0));
}

TEST_CASE("synthesize_dataset: noise-free limit and noise structure") {
  const auto ex1 = builtin_example(1);
  const GridSpec g(9, 7);
  const TimeGrid tg(1.0, 20);
  const auto clean = synthesize_dataset(ex1, g, tg, spec_with(0.0, 0.0, 4));
  CHECK(clean.d == ex1.sample_h(g));
  REQUIRE(clean.g.size() == tg.size());
  for (std::size_t k = 0; k < tg.size(); ++k) CHECK(clean.g[k] == ex1.sample_f(g, tg.points()[k]));

  const auto a = synthesize_dataset(ex1, g, tg, NoiseSpec::from_level(0.1, NoiseConvention::paper, 1));
  const auto b = synthesize_dataset(ex1, g, tg, NoiseSpec::from_level(0.1, NoiseConvention::paper, 2));
  CHECK_FALSE(a.d == b.d);
  CHECK(a.g[0] == clean.g[0]);
  CHECK(b.g[0] == clean.g[0]);

  const auto again = synthesize_dataset(ex1, g, tg, NoiseSpec::from_level(0.1, NoiseConvention::paper, 1));
  CHECK(again.d == a.d);
  for (std::size_t k = 0; k < tg.size(); ++k) CHECK(again.g[k] == a.g[k]);

  // The source noise is vartheta * xi with the same paths brownian_paths draws.
  const auto xi = brownian_paths(a.spec, g, tg);
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 7; ++j)
      CHECK(a.g[7](i, j) - clean.g[7](i, j) == doctest::Approx(a.spec.vartheta * xi[7](i, j)).epsilon(1e-12).scale(1.0));
}

TEST_CASE("dataset CSV round trip is exact") {
  const auto ex2 = builtin_example(2);
  const GridSpec g(5, 4);
  const TimeGrid tg(1.0, 10);
  const auto ds = synthesize_dataset(ex2, g, tg, NoiseSpec::from_level(0.01, NoiseConvention::paper, 42));
  const auto dir = std::filesystem::temp_directory_path() / "bheat_test_dataset_roundtrip";
  std::filesystem::remove_all(dir);
  write_dataset(ds, dir);
  CHECK(std::filesystem::exists(dir / "d.csv"));
  CHECK(std::filesystem::exists(dir / "g.csv"));
  CHECK(std::filesystem::exists(dir / "meta.txt"));

  const auto back = read_dataset(dir);
  CHECK(back.grid == ds.grid);
  CHECK(back.time_grid == ds.time_grid);
  CHECK(back.d == ds.d);
  REQUIRE(back.g.size() == ds.g.size());
  for (std::size_t k = 0; k < ds.g.size(); ++k) CHECK(back.g[k] == ds.g[k]);
  CHECK(back.spec.sigma == ds.spec.sigma);
  CHECK(back.spec.vartheta == ds.spec.vartheta);
  CHECK(back.spec.seed == 42);
  std::filesystem::remove_all(dir);

  CHECK_THROWS(read_dataset(dir));
}
