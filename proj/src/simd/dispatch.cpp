#include "tables.hpp"

#include <atomic>
#include <stdexcept>
#include <string>

namespace backflow::simd {
namespace {

bool cpu_has(Isa isa) noexcept {
    switch (isa) {
    case Isa::Scalar:
        return true;
    case Isa::Avx2:
#if defined(BACKFLOW_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    case Isa::Neon:
#if defined(BACKFLOW_HAVE_NEON_TU)
        return true; // mandatory on AArch64
#else
        return false;
#endif
    }
    return false;
}

std::atomic<const KernelTable*> g_active{nullptr};

} // namespace

std::string_view name(Isa isa) noexcept {
    switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
    }
    return "unknown";
}

const KernelTable* table_for(Isa isa) noexcept {
    if (!cpu_has(isa)) return nullptr;
    switch (isa) {
    case Isa::Scalar:
        return &detail::scalar_table;
    case Isa::Avx2:
#if defined(BACKFLOW_HAVE_AVX2_TU)
        return &detail::avx2_table;
#else
        return nullptr;
#endif
    case Isa::Neon:
#if defined(BACKFLOW_HAVE_NEON_TU)
        return &detail::neon_table;
#else
        return nullptr;
#endif
    }
    return nullptr;
}

Isa detect() noexcept {
    if (cpu_has(Isa::Avx2)) return Isa::Avx2;
    if (cpu_has(Isa::Neon)) return Isa::Neon;
    return Isa::Scalar;
}

const KernelTable& active() noexcept {
    const KernelTable* t = g_active.load(std::memory_order_acquire);
    if (t == nullptr) {
        t = table_for(detect());
        g_active.store(t, std::memory_order_release);
    }
    return *t;
}

void force(Isa isa) {
    const KernelTable* t = table_for(isa);
    if (t == nullptr) throw std::runtime_error("ISA not available: " + std::string(name(isa)));
    g_active.store(t, std::memory_order_release);
}

void reset() noexcept { g_active.store(table_for(detect()), std::memory_order_release); }

std::vector<Isa> available() {
    std::vector<Isa> out;
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
        if (table_for(isa) != nullptr) out.push_back(isa);
    }
    return out;
}

} // namespace backflow::simd
