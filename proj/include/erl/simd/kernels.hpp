#pragma once

// Vector kernels behind embedding retrieval.
//
// Every kernel has a scalar reference implementation. Wider variants (AVX2+FMA
// on x86-64, NEON on AArch64) are compiled in separate translation units and
// picked at runtime from what the CPU reports. ERL_SIMD=scalar in the
// environment forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace erl::simd {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa);

// dot(a, b), |a|^2 and |b|^2 from a single pass.
struct CosineParts {
  double dot = 0.0;
  double norm_sq_a = 0.0;
  double norm_sq_b = 0.0;
};

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_norm)(const double* a, std::size_t n);
  CosineParts (*cosine_parts)(const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the variant was not compiled in or the CPU lacks the extension.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

// Widest supported table, resolved once.
const KernelTable& active_kernels();

// Convenience wrappers over active_kernels(). Callers check sizes.
double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);
CosineParts cosine_parts(std::span<const double> a, std::span<const double> b);

}  // namespace erl::simd
