#include <arm_neon.h>

#include "erl/simd/kernels.hpp"
#include "kernels_internal.hpp"

namespace erl::simd {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double squared_norm_neon(const double* a, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t va = vld1q_f64(a + i);
    acc0 = vfmaq_f64(acc0, va, va);
  }
  double acc = vaddvq_f64(acc0);
  for (; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

CosineParts cosine_parts_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t ab = vdupq_n_f64(0.0);
  float64x2_t aa = vdupq_n_f64(0.0);
  float64x2_t bb = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t va = vld1q_f64(a + i);
    float64x2_t vb = vld1q_f64(b + i);
    ab = vfmaq_f64(ab, va, vb);
    aa = vfmaq_f64(aa, va, va);
    bb = vfmaq_f64(bb, vb, vb);
  }
  CosineParts p{vaddvq_f64(ab), vaddvq_f64(aa), vaddvq_f64(bb)};
  for (; i < n; ++i) {
    p.dot += a[i] * b[i];
    p.norm_sq_a += a[i] * a[i];
    p.norm_sq_b += b[i] * b[i];
  }
  return p;
}

constexpr KernelTable kNeon{Isa::neon, dot_neon, squared_norm_neon, cosine_parts_neon};

}  // namespace

namespace detail {
const KernelTable& neon_table() { return kNeon; }
}  // namespace detail

}  // namespace erl::simd
