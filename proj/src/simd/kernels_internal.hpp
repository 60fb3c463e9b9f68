#pragma once

#include "erl/simd/kernels.hpp"

namespace erl::simd::detail {

#if defined(ERL_HAVE_AVX2_KERNELS)
const KernelTable& avx2_table();
#endif
#if defined(ERL_HAVE_NEON_KERNELS)
const KernelTable& neon_table();
#endif

}  // namespace erl::simd::detail
