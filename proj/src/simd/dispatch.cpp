#include <cstdlib>
#include <string>

#include "erl/simd/kernels.hpp"
#include "kernels_internal.hpp"

namespace erl::simd {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

const KernelTable* avx2_kernels() {
#if defined(ERL_HAVE_AVX2_KERNELS)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_kernels() {
#if defined(ERL_HAVE_NEON_KERNELS)
  // Advanced SIMD is mandatory on AArch64.
  return &detail::neon_table();
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  static const KernelTable& table = []() -> const KernelTable& {
    const char* forced = std::getenv("ERL_SIMD");
    if (forced != nullptr && std::string(forced) == "scalar") return scalar_kernels();
    if (const KernelTable* t = avx2_kernels()) return *t;
    if (const KernelTable* t = neon_kernels()) return *t;
    return scalar_kernels();
  }();
  return table;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return active_kernels().dot(a.data(), b.data(), a.size());
}

double squared_norm(std::span<const double> a) {
  return active_kernels().squared_norm(a.data(), a.size());
}

CosineParts cosine_parts(std::span<const double> a, std::span<const double> b) {
  return active_kernels().cosine_parts(a.data(), b.data(), a.size());
}

}  // namespace erl::simd
