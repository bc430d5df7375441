#include "backflow/kernel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace backflow {

double sinc(double x) noexcept {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

namespace {

// Per-node factors of the relativistic kernel.
struct NodeTerms {
    double r;
    double g;        // gamma(r)
    double inv_norm; // 1 / sqrt(gamma (gamma + 1))
};

NodeTerms node_terms(double r, EpsilonParams eps) {
    const double g = gamma(r, eps);
    return {r, g, 1.0 / std::sqrt(g * (g + 1.0))};
}

// gamma(r) - gamma(s) = eps^2 (r^2 - s^2) / (gamma(r) + gamma(s)), so the sinc
// argument 2 (gamma(r) - gamma(s)) / eps^2 never subtracts the gammas.
double kernel_from_terms(const NodeTerms& a, const NodeTerms& b) noexcept {
    const double num = a.r * (b.g + 1.0) + b.r * (a.g + 1.0);
    const double arg = 2.0 * (a.r - b.r) * (a.r + b.r) / (a.g + b.g);
    return std::numbers::inv_pi * num * a.inv_norm * b.inv_norm * sinc(arg);
}

} // namespace

double kernel_rel(double r, double s, EpsilonParams eps) {
    if (eps.nonrelativistic()) {
        throw std::domain_error("kernel_rel: eps == 0, use kernel_nonrel");
    }
    if (r < 0.0 || s < 0.0) throw std::domain_error("kernel_rel: momenta must be >= 0");
    return kernel_from_terms(node_terms(r, eps), node_terms(s, eps));
}

double kernel_nonrel(double r, double s) noexcept {
    return std::numbers::inv_pi * (r + s) * sinc((r - s) * (r + s));
}

double kernel(double r, double s, EpsilonParams eps) {
    return eps.nonrelativistic() ? kernel_nonrel(r, s) : kernel_rel(r, s, eps);
}

KernelMatrix assemble(EpsilonParams eps, const QuadGrid& grid) {
    const std::size_t n = grid.size();
    if (n == 0 || grid.weights.size() != n) throw std::invalid_argument("assemble: invalid grid");

    KernelMatrix m;
    m.eps = eps;
    m.grid = grid;
    m.entries.assign(n * n, 0.0);
    m.sqrt_weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) m.sqrt_weights[i] = std::sqrt(grid.weights[i]);

    std::vector<NodeTerms> terms;
    terms.reserve(n);
    for (double r : grid.nodes) terms.push_back(node_terms(r, eps));

    const bool nonrel = eps.nonrelativistic();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double k = nonrel ? kernel_nonrel(grid.nodes[i], grid.nodes[j])
                                    : kernel_from_terms(terms[i], terms[j]);
            const double v = m.sqrt_weights[i] * k * m.sqrt_weights[j];
            m.entries[i * n + j] = v;
            m.entries[j * n + i] = v;
        }
    }
    return m;
}

void write_matrix_csv(const KernelMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    const std::size_t n = m.size();
    char buf[32];
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            std::snprintf(buf, sizeof buf, "%.16e", m(i, j));
            if (j) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

} // namespace backflow
