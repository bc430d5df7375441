#include "tables.hpp"

#include <arm_neon.h>

namespace backflow::simd::detail {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void gemv_neon(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot_neon(m + r * cols, x, cols);
}

double weighted_sq_diff_neon(const double* w, const double* a, const double* b, double s, std::size_t n) {
    const float64x2_t sv = vdupq_n_f64(s);
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d = vfmsq_f64(vld1q_f64(a + i), sv, vld1q_f64(b + i));
        acc = vfmaq_f64(acc, vmulq_f64(vld1q_f64(w + i), d), d);
    }
    double total = vaddvq_f64(acc);
    for (; i < n; ++i) {
        const double d = a[i] - s * b[i];
        total += w[i] * d * d;
    }
    return total;
}

} // namespace

const KernelTable neon_table{Isa::Neon, dot_neon, gemv_neon, weighted_sq_diff_neon};

} // namespace backflow::simd::detail
