#include <atomic>
#include <cstdlib>
#include <string>

#include "bheat/kernels.hpp"
#include "kernels_impl.hpp"

namespace bheat::kernels {

namespace {

const KernelTable kScalar{Isa::scalar, detail::dot_scalar, detail::axpy_scalar,
                          detail::sum_sq_diff_scalar};

#ifdef BHEAT_HAS_AVX2
const KernelTable kAvx2{Isa::avx2, detail::dot_avx2, detail::axpy_avx2,
                        detail::sum_sq_diff_avx2};
#endif

const KernelTable* initial_table() {
  if (const char* env = std::getenv("BHEAT_KERNELS"); env && std::string(env) == "scalar") {
    return &kScalar;
  }
  if (const KernelTable* t = avx2_table(); t && cpu_supports(Isa::avx2)) return t;
  return &kScalar;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* avx2_table() {
#ifdef BHEAT_HAS_AVX2
  return &kAvx2;
#else
  return nullptr;
#endif
}

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

bool select(Isa isa) {
  const KernelTable* t = nullptr;
  if (isa == Isa::scalar) t = &kScalar;
  if (isa == Isa::avx2 && cpu_supports(Isa::avx2)) t = avx2_table();
  if (!t) return false;
  current().store(t, std::memory_order_release);
  return true;
}

Isa active_isa() { return active().isa; }

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace bheat::kernels
