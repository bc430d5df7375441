#include "tables.hpp"

namespace backflow::simd::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void gemv_scalar(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t i = 0; i < rows; ++i) y[i] = dot_scalar(m + i * cols, x, cols);
}

double weighted_sq_diff_scalar(const double* w, const double* a, const double* b, double s, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - s * b[i];
        acc += w[i] * d * d;
    }
    return acc;
}

} // namespace

const KernelTable scalar_table{Isa::Scalar, dot_scalar, gemv_scalar, weighted_sq_diff_scalar};

} // namespace backflow::simd::detail
