#include "erl/simd/kernels.hpp"

namespace erl::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double squared_norm_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

CosineParts cosine_parts_scalar(const double* a, const double* b, std::size_t n) {
  CosineParts p;
  for (std::size_t i = 0; i < n; ++i) {
    p.dot += a[i] * b[i];
    p.norm_sq_a += a[i] * a[i];
    p.norm_sq_b += b[i] * b[i];
  }
  return p;
}

constexpr KernelTable kScalar{Isa::scalar, dot_scalar, squared_norm_scalar, cosine_parts_scalar};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace erl::simd
