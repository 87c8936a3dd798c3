#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "bheat/kernels.hpp"

using namespace bheat::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(gen);
  return v;
}

double abs_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] * b[i]);
  return s;
}

}  // namespace

TEST_CASE("scalar table is always available and selectable") {
  CHECK(scalar_table().isa == Isa::scalar);
  CHECK(cpu_supports(Isa::scalar));
  const Isa before = active_isa();
  CHECK(select(Isa::scalar));
  CHECK(active_isa() == Isa::scalar);
  CHECK(select(before));
  CHECK(isa_name(Isa::scalar) == "scalar");
  CHECK(isa_name(Isa::avx2) == "avx2");
}

TEST_CASE("avx2 selection fails cleanly when unavailable") {
  if (avx2_table() != nullptr && cpu_supports(Isa::avx2)) {
    const Isa before = active_isa();
    CHECK(select(Isa::avx2));
    CHECK(active_isa() == Isa::avx2);
    select(before);
  } else {
    const Isa before = active_isa();
    CHECK_FALSE(select(Isa::avx2));
    CHECK(active_isa() == before);
  }
}

TEST_CASE("scalar reference kernels on hand-checked inputs") {
  const auto& t = scalar_table();
  const double a[] = {1.0, 2.0, 3.0};
  const double b[] = {4.0, -5.0, 6.0};
  CHECK(t.dot(a, b, 3) == doctest::Approx(12.0));
  CHECK(t.dot(a, b, 0) == 0.0);
  CHECK(t.sum_sq_diff(a, b, 3) == doctest::Approx(9.0 + 49.0 + 9.0));
  double y[] = {1.0, 1.0, 1.0};
  t.axpy(2.0, a, y, 3);
  CHECK(y[0] == 3.0);
  CHECK(y[1] == 5.0);
  CHECK(y[2] == 7.0);
}

TEST_CASE("avx2 kernels agree with the scalar reference across lengths and tails") {
  const KernelTable* vec = avx2_table();
  if (vec == nullptr || !cpu_supports(Isa::avx2)) {
    MESSAGE("AVX2 variant not available on this build/CPU; nothing to compare");
    return;
  }
  const auto& ref = scalar_table();
  std::mt19937_64 gen(12345);
  for (std::size_t n = 0; n <= 67; ++n) {
    CAPTURE(n);
    const auto a = random_vector(n, gen);
    const auto b = random_vector(n, gen);
    const double scale = abs_dot(a, b) + 1e-300;
    CHECK(std::abs(vec->dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <= 1e-14 * scale * (n + 1));

    double sq_scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) sq_scale += (a[i] - b[i]) * (a[i] - b[i]);
    CHECK(std::abs(vec->sum_sq_diff(a.data(), b.data(), n) - ref.sum_sq_diff(a.data(), b.data(), n)) <=
          1e-14 * (sq_scale + 1e-300) * (n + 1));

    auto y_ref = random_vector(n, gen);
    auto y_vec = y_ref;
    ref.axpy(0.75, a.data(), y_ref.data(), n);
    vec->axpy(0.75, a.data(), y_vec.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y_vec[i] == doctest::Approx(y_ref[i]).epsilon(1e-15));
  }
}

TEST_CASE("kernels handle unaligned views") {
  std::mt19937_64 gen(7);
  const auto a = random_vector(41, gen);
  const auto b = random_vector(41, gen);
  const auto& ref = scalar_table();
  for (std::size_t off = 0; off < 4; ++off) {
    const std::size_t n = 41 - off;
    std::span<const double> sa(a.data() + off, n);
    std::span<const double> sb(b.data() + off, n);
    CHECK(dot(sa, sb) == doctest::Approx(ref.dot(sa.data(), sb.data(), n)).epsilon(1e-13));
    CHECK(sum_sq_diff(sa, sb) == doctest::Approx(ref.sum_sq_diff(sa.data(), sb.data(), n)).epsilon(1e-13));
  }
}

TEST_CASE("BHEAT_KERNELS=scalar forces the reference path at startup") {
  const char* env = std::getenv("BHEAT_KERNELS");
  if (env != nullptr && std::string(env) == "scalar") {
    CHECK(active_isa() == Isa::scalar);
  } else if (avx2_table() != nullptr && cpu_supports(Isa::avx2)) {
    CHECK(active_isa() == Isa::avx2);
  } else {
    CHECK(active_isa() == Isa::scalar);
  }
}
