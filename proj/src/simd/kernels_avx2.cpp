#include "tables.hpp"

#include <immintrin.h>

namespace backflow::simd::detail {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
        acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
        acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double s = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

// Four rows per pass so each load of x feeds four FMAs.
void gemv_avx2(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y) {
    std::size_t r = 0;
    for (; r + 4 <= rows; r += 4) {
        const double* m0 = m + r * cols;
        const double* m1 = m0 + cols;
        const double* m2 = m1 + cols;
        const double* m3 = m2 + cols;
        __m256d a0 = _mm256_setzero_pd();
        __m256d a1 = _mm256_setzero_pd();
        __m256d a2 = _mm256_setzero_pd();
        __m256d a3 = _mm256_setzero_pd();
        std::size_t j = 0;
        for (; j + 4 <= cols; j += 4) {
            const __m256d xv = _mm256_loadu_pd(x + j);
            a0 = _mm256_fmadd_pd(_mm256_loadu_pd(m0 + j), xv, a0);
            a1 = _mm256_fmadd_pd(_mm256_loadu_pd(m1 + j), xv, a1);
            a2 = _mm256_fmadd_pd(_mm256_loadu_pd(m2 + j), xv, a2);
            a3 = _mm256_fmadd_pd(_mm256_loadu_pd(m3 + j), xv, a3);
        }
        double s0 = hsum(a0), s1 = hsum(a1), s2 = hsum(a2), s3 = hsum(a3);
        for (; j < cols; ++j) {
            s0 += m0[j] * x[j];
            s1 += m1[j] * x[j];
            s2 += m2[j] * x[j];
            s3 += m3[j] * x[j];
        }
        y[r] = s0;
        y[r + 1] = s1;
        y[r + 2] = s2;
        y[r + 3] = s3;
    }
    for (; r < rows; ++r) y[r] = dot_avx2(m + r * cols, x, cols);
}

double weighted_sq_diff_avx2(const double* w, const double* a, const double* b, double s, std::size_t n) {
    const __m256d sv = _mm256_set1_pd(s);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_fnmadd_pd(sv, _mm256_loadu_pd(b + i), _mm256_loadu_pd(a + i));
        acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), d), d, acc);
    }
    double total = hsum(acc);
    for (; i < n; ++i) {
        const double d = a[i] - s * b[i];
        total += w[i] * d * d;
    }
    return total;
}

} // namespace

const KernelTable avx2_table{Isa::Avx2, dot_avx2, gemv_avx2, weighted_sq_diff_avx2};

} // namespace backflow::simd::detail
