#include "backflow/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace backflow {

EpsilonParams::EpsilonParams(double epsilon) : epsilon_(epsilon) {
    if (!std::isfinite(epsilon) || epsilon < 0.0) {
        throw std::domain_error("epsilon must be finite and >= 0, got " + std::to_string(epsilon));
    }
}

double gamma(double r, EpsilonParams eps) noexcept {
    const double er = eps.value() * r;
    if (er == 0.0) return 1.0;
    return std::sqrt(1.0 + er * er);
}

EpsilonParams epsilon_from_physical(double mass, double period, double hbar, double c) {
    for (double v : {mass, period, hbar, c}) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::domain_error("epsilon_from_physical: arguments must be finite and > 0");
        }
    }
    // Form mc^2T/hbar first so tiny SI magnitudes do not underflow.
    const double ratio = (mass * c) * (c * period) / hbar;
    return EpsilonParams(std::sqrt(4.0 / ratio));
}

QuadGrid build_grid(double q0, int n0, int h) {
    if (!(q0 > 0.0) || !std::isfinite(q0)) throw std::domain_error("build_grid: q0 must be > 0");
    if (n0 < 2) throw std::domain_error("build_grid: n0 must be >= 2");
    if (h < 1) throw std::domain_error("build_grid: h must be >= 1");

    QuadGrid g;
    g.q0 = q0;
    g.n0 = n0;
    g.h = h;
    const std::size_t n = static_cast<std::size_t>(n0) * static_cast<std::size_t>(h);
    const double upper = q0 * std::sqrt(static_cast<double>(h));
    const double step = upper / static_cast<double>(n - 1);

    g.nodes.resize(n);
    g.weights.assign(n, step);
    for (std::size_t i = 0; i < n; ++i) g.nodes[i] = step * static_cast<double>(i);
    g.nodes.back() = upper;
    g.weights.front() = 0.5 * step;
    g.weights.back() = 0.5 * step;
    return g;
}

double integrate(const QuadGrid& grid, const std::vector<double>& samples) {
    if (samples.size() != grid.size()) throw std::invalid_argument("integrate: size mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) sum += grid.weights[i] * samples[i];
    return sum;
}

} // namespace backflow
