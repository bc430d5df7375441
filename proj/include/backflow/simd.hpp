#pragma once

// Runtime-dispatched dense linear algebra kernels.
//
// Every kernel has a scalar reference implementation; vector variants are
// compiled in separate translation units with their own ISA flags and are
// only selected when the running CPU reports support.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace backflow::simd {

enum class Isa { Scalar, Avx2, Neon };

struct KernelTable {
    Isa isa;
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y = M x for a row-major rows x cols matrix.
    void (*gemv)(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y);
    // sum_i w[i] * (a[i] - s * b[i])^2
    double (*weighted_sq_diff)(const double* w, const double* a, const double* b, double s, std::size_t n);
};

std::string_view name(Isa isa) noexcept;

/// Table for a specific ISA, or nullptr when it was not compiled in or the CPU
/// lacks it.
const KernelTable* table_for(Isa isa) noexcept;

/// Best ISA available on this machine.
Isa detect() noexcept;

/// Kernels used by the library. Defaults to detect().
const KernelTable& active() noexcept;

/// Pin the active table (tests and benchmarks). Throws if unavailable.
void force(Isa isa);
void reset() noexcept;

std::vector<Isa> available();

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}

inline void gemv(std::span<const double> m, std::size_t n, std::span<const double> x, std::span<double> y) {
    active().gemv(m.data(), n, n, x.data(), y.data());
}

} // namespace backflow::simd
