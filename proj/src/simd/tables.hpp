#pragma once

#include "backflow/simd.hpp"

namespace backflow::simd::detail {

extern const KernelTable scalar_table;
#if defined(BACKFLOW_HAVE_AVX2_TU)
extern const KernelTable avx2_table;
#endif
#if defined(BACKFLOW_HAVE_NEON_TU)
extern const KernelTable neon_table;
#endif

} // namespace backflow::simd::detail
