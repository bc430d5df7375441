#include "backflow/current.hpp"

#include "backflow/simd.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace backflow {

double spinor_upper(double r, EpsilonParams eps) noexcept {
    const double g = gamma(r, eps);
    return std::sqrt((g + 1.0) / (2.0 * g));
}

// gamma - 1 = eps^2 r^2 / (gamma + 1), so sqrt(gamma - 1) never cancels.
double spinor_lower(double r, EpsilonParams eps) noexcept {
    const double g = gamma(r, eps);
    return eps.value() * r / std::sqrt(2.0 * g * (g + 1.0));
}

Envelope envelope_from_real(EpsilonParams eps, const QuadGrid& grid, std::span<const double> eta) {
    if (eps.nonrelativistic()) throw std::domain_error("envelope: eps == 0 has no relativistic current");
    if (eta.size() != grid.size()) throw std::invalid_argument("envelope: size mismatch");
    double norm2 = 0.0;
    for (std::size_t i = 0; i < eta.size(); ++i) norm2 += grid.weights[i] * eta[i] * eta[i];
    if (!(norm2 > 0.0) || !std::isfinite(norm2)) throw std::domain_error("envelope: zero or non-finite profile");
    const double scale = 1.0 / std::sqrt(norm2);
    const double e2 = eps.value() * eps.value();

    Envelope env;
    env.grid = grid;
    env.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        env.values[i] = std::polar(scale * eta[i], 2.0 * gamma(grid.nodes[i], eps) / e2);
    }
    return env;
}

Envelope envelope_from_eigvec(const EigenSolution& sol) { return envelope_from_real(sol.eps, sol.grid, sol.eta); }

int default_n_tau(EpsilonParams eps) {
    if (eps.nonrelativistic()) throw std::domain_error("default_n_tau: eps must be > 0");
    const double e = eps.value();
    const double scaled = std::ceil(40.0 / (e * e));
    return scaled > 4001.0 ? static_cast<int>(std::min(scaled, 1e8)) : 4001;
}

CurrentTrace current_trace(const Envelope& env, EpsilonParams eps, int n_tau) {
    if (eps.nonrelativistic()) throw std::domain_error("current_trace: eps must be > 0");
    if (n_tau < 2) throw std::domain_error("current_trace: n_tau must be >= 2");
    const QuadGrid& grid = env.grid;
    const std::size_t n = grid.size();
    if (env.values.size() != n) throw std::invalid_argument("current_trace: envelope size mismatch");

    double norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm2 += grid.weights[i] * std::norm(env.values[i]);
    if (std::abs(norm2 - 1.0) > 1e-6) throw std::domain_error("current_trace: envelope is not normalised");

    // The time factor exp(-4i gamma tau / eps^2) is applied relative to the
    // rest-energy phase exp(-4i tau / eps^2); a global phase drops out of
    // Re(conj(A) B), and 4 (gamma - 1) / eps^2 = 4 r^2 / (gamma + 1) is exact.
    std::vector<std::complex<double>> ca(n), cb(n);
    std::vector<double> freq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = grid.nodes[i];
        ca[i] = grid.weights[i] * spinor_upper(r, eps) * env.values[i];
        cb[i] = grid.weights[i] * spinor_lower(r, eps) * env.values[i];
        freq[i] = 4.0 * r * r / (gamma(r, eps) + 1.0);
    }

    CurrentTrace trace;
    trace.eps = eps;
    trace.taus.resize(static_cast<std::size_t>(n_tau));
    trace.J.resize(static_cast<std::size_t>(n_tau));
    const double prefactor = 4.0 / (std::numbers::pi * eps.value());
    const double dtau = 1.0 / (n_tau - 1);

    for (int k = 0; k < n_tau; ++k) {
        const double tau = k == n_tau - 1 ? 1.0 : k * dtau;
        std::complex<double> a{}, b{};
        for (std::size_t i = 0; i < n; ++i) {
            const std::complex<double> phase = std::polar(1.0, -freq[i] * tau);
            a += ca[i] * phase;
            b += cb[i] * phase;
        }
        trace.taus[k] = tau;
        trace.J[k] = prefactor * (a.real() * b.real() + a.imag() * b.imag());
    }

    double delta = 0.0;
    for (int k = 0; k + 1 < n_tau; ++k) delta += 0.5 * dtau * (trace.J[k] + trace.J[k + 1]);
    trace.delta = delta;
    return trace;
}

double rayleigh_quotient(std::span<const double> eta, const KernelMatrix& m) {
    const std::size_t n = m.size();
    if (eta.size() != n) throw std::invalid_argument("rayleigh_quotient: size mismatch");
    std::vector<double> v(n), mv(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = m.sqrt_weights[i] * eta[i];
    const double vv = simd::dot(v, v);
    if (!(vv > 0.0)) throw std::domain_error("rayleigh_quotient: zero vector");
    simd::gemv(m.entries, n, v, mv);
    return simd::dot(v, mv) / vv;
}

int sign_changes(const CurrentTrace& trace) {
    int changes = 0;
    int last = 0;
    for (double j : trace.J) {
        const int s = (j > 0.0) - (j < 0.0);
        if (s == 0) continue;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

int turning_points(const CurrentTrace& trace) {
    int turns = 0;
    int last = 0;
    for (std::size_t i = 1; i < trace.J.size(); ++i) {
        const double d = trace.J[i] - trace.J[i - 1];
        const int s = (d > 0.0) - (d < 0.0);
        if (s == 0) continue;
        if (last != 0 && s != last) ++turns;
        last = s;
    }
    return turns;
}

void write_current_csv(const CurrentTrace& trace, std::ostream& out) {
    out << "tau,J\n";
    char buf[64];
    for (std::size_t k = 0; k < trace.taus.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.16e,%.16e\n", trace.taus[k], trace.J[k]);
        out << buf;
    }
}

void write_current_csv(const CurrentTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    write_current_csv(trace, out);
}

} // namespace backflow
