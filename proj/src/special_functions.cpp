#include "backflow/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace backflow {
namespace {

constexpr double kSeriesLimitJ0 = 4.0;
constexpr double kAsymptoticJ0 = 20.0;

double j0_series(double x) {
    const double q = -0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 60; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (std::abs(term) < 1e-18) break;
    }
    return sum;
}

// Miller's backward recurrence normalised with J0 + 2 sum_k J_2k = 1.
double j0_miller(double x) {
    int n = 2 * static_cast<int>(std::ceil((x + 40.0) / 2.0));
    const double two_over_x = 2.0 / x;
    double jp1 = 0.0;
    double j = 1e-30;
    double even_sum = 0.0;
    for (int k = n; k >= 1; --k) {
        const double jm1 = k * two_over_x * j - jp1;
        jp1 = j;
        j = jm1;
        if ((k - 1) % 2 == 0 && k - 1 > 0) even_sum += j;
    }
    return j / (j + 2.0 * even_sum);
}

// Hankel expansion J0(x) = sqrt(2/(pi x)) (P cos chi - Q sin chi), chi = x - pi/4.
double j0_asymptotic(double x) {
    const double inv8x = 1.0 / (8.0 * x);
    double p = 1.0;
    double q = 0.0;
    double term = 1.0;
    double prev = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= odd * odd * inv8x / k;
        if (std::abs(term) > prev || std::abs(term) < 1e-18) break;
        prev = std::abs(term);
        // P = 1 - b2 + b4 - ..., Q = -b1 + b3 - ...
        switch (k % 4) {
        case 0: p += term; break;
        case 1: q -= term; break;
        case 2: p -= term; break;
        case 3: q += term; break;
        }
    }
    const double chi = x - 0.25 * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

constexpr long double kAi0 = 0.355028053887817239260063186004183176L;
constexpr long double kAip0 = 0.258819403792806798405183560189203963L; // -Ai'(0)

double airy_maclaurin(double xd) {
    const long double x = xd;
    const long double x3 = x * x * x;
    long double f = 1.0L, g = x;
    long double tf = 1.0L, tg = x;
    for (int k = 1; k < 200; ++k) {
        tf *= x3 / ((3.0L * k - 1.0L) * (3.0L * k));
        tg *= x3 / ((3.0L * k) * (3.0L * k + 1.0L));
        f += tf;
        g += tg;
        if (std::abs(tf) + std::abs(tg) < 1e-22L * (std::abs(f) + std::abs(g))) break;
    }
    return static_cast<double>(kAi0 * f - kAip0 * g);
}

// u_k = (6k-5)(6k-3)(6k-1) / ((2k-1) 216 k) u_{k-1}
double airy_u_ratio(int k) {
    return (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / ((2.0 * k - 1.0) * 216.0 * k);
}

double airy_decaying(double x) {
    const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
    double sum = 1.0;
    double term = 1.0;
    for (int k = 1; k < 80; ++k) {
        const double next = -term * airy_u_ratio(k) / zeta;
        if (std::abs(next) > std::abs(term) || std::abs(next) < 1e-18) break;
        term = next;
        sum += term;
    }
    return std::exp(-zeta) / (2.0 * std::sqrt(std::numbers::pi) * std::sqrt(std::sqrt(x))) * sum;
}

double airy_oscillatory(double x) {
    const double z = -x;
    const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
    double even = 1.0; // sum (-1)^k u_2k / zeta^2k
    double odd = 0.0;  // sum (-1)^k u_2k+1 / zeta^2k+1
    double u_over = 1.0;
    for (int k = 1; k < 120; ++k) {
        const double next = u_over * airy_u_ratio(k) / zeta;
        if (next > u_over || next < 1e-18) break;
        u_over = next;
        const int m = k / 2;
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 0) even += sign * u_over;
        else odd += sign * u_over;
    }
    const double phase = zeta - 0.25 * std::numbers::pi;
    return (std::cos(phase) * even + std::sin(phase) * odd) / (std::sqrt(std::numbers::pi) * std::sqrt(std::sqrt(z)));
}

} // namespace

double bessel_j0(double x) {
    if (!std::isfinite(x)) throw std::domain_error("bessel_j0: non-finite argument");
    const double ax = std::abs(x);
    if (ax <= kSeriesLimitJ0) return j0_series(ax);
    if (ax <= kAsymptoticJ0) return j0_miller(ax);
    return j0_asymptotic(ax);
}

double airy_ai(double x) {
    if (!std::isfinite(x)) throw std::domain_error("airy_ai: non-finite argument");
    if (x >= 8.0) return airy_decaying(x);
    if (x <= -7.5) return airy_oscillatory(x);
    return airy_maclaurin(x);
}

} // namespace backflow
