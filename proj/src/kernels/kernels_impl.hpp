#pragma once

#include <cstddef>

namespace bheat::kernels::detail {

double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
double sum_sq_diff_scalar(const double* a, const double* b, std::size_t n);

#ifdef BHEAT_HAS_AVX2
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
double sum_sq_diff_avx2(const double* a, const double* b, std::size_t n);
#endif

}  // namespace bheat::kernels::detail
