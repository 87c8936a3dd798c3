#pragma once

// Inner-loop arithmetic used by the sine transforms and error metrics.
//
// Every kernel has a scalar reference implementation and, on x86-64 builds,
// an AVX2/FMA variant. The active table is chosen once at startup from the
// CPU feature flags; setting BHEAT_KERNELS=scalar in the environment forces
// the reference path. The variants agree to rounding (summation order and
// fused multiply-add differ), which tests/unit/test_kernels.cpp pins down.

#include <cstddef>
#include <span>
#include <string_view>

namespace bheat::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// sum_i (a[i] - b[i])^2
  double (*sum_sq_diff)(const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_table();
/// nullptr when the variant was not compiled in.
const KernelTable* avx2_table();

bool cpu_supports(Isa isa);

/// Currently active table.
const KernelTable& active();
/// Force a variant. Returns false (and leaves the selection unchanged) if the
/// variant is unavailable on this build or CPU.
bool select(Isa isa);
Isa active_isa();
std::string_view isa_name(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
  return active().sum_sq_diff(a.data(), b.data(), a.size());
}

}  // namespace bheat::kernels
