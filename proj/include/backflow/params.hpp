#pragma once

// Dimensionless parameterisation of the relativistic backflow problem.
//
// Momenta are measured in units of sqrt(4 m hbar / T), so p = m c eps r and
// E(p) = gamma(r) m c^2 with gamma(r) = sqrt(1 + eps^2 r^2). Everything past
// this header works in these units; physical constants only enter through
// epsilon_from_physical().

#include <cstddef>
#include <vector>

namespace backflow {

/// Relativity parameter eps = sqrt(4 hbar / (m c^2 T)). eps == 0 selects the
/// non-relativistic kernel.
class EpsilonParams {
public:
    EpsilonParams() = default;
    explicit EpsilonParams(double epsilon);

    double value() const noexcept { return epsilon_; }
    bool nonrelativistic() const noexcept { return epsilon_ == 0.0; }

    friend bool operator==(const EpsilonParams&, const EpsilonParams&) = default;

private:
    double epsilon_ = 0.0;
};

/// gamma(r) = sqrt(1 + eps^2 r^2); exactly 1 for eps == 0 or r == 0.
double gamma(double r, EpsilonParams eps) noexcept;

/// Physical inputs in SI units; every argument must be strictly positive.
EpsilonParams epsilon_from_physical(double mass, double period, double hbar, double c);

/// Uniform trapezoidal grid on [0, q0 * sqrt(h)] with n0 * h nodes.
struct QuadGrid {
    double q0 = 0.0;
    int n0 = 0;
    int h = 1;
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const noexcept { return nodes.size(); }
    double upper() const noexcept { return nodes.empty() ? 0.0 : nodes.back(); }
    double spacing() const noexcept { return nodes.size() < 2 ? 0.0 : nodes[1] - nodes[0]; }
};

QuadGrid build_grid(double q0, int n0, int h);

/// Trapezoidal integral of sampled values on the grid.
double integrate(const QuadGrid& grid, const std::vector<double>& samples);

} // namespace backflow
