#pragma once

// Backflow kernel K(r, s) and its Nystrom discretisation.
//
// K is the flux operator: for a real envelope eta the probability flux through
// the origin over the window is <eta, K eta>. Its most negative eigenvalue is
// the maximal backflow.

#include "backflow/params.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace backflow {

/// sin(x)/x with a series branch for |x| < 1e-4.
double sinc(double x) noexcept;

/// Relativistic kernel; eps must be > 0. Symmetric in (r, s).
double kernel_rel(double r, double s, EpsilonParams eps);

/// eps -> 0 limit, (1/pi) sin(r^2 - s^2)/(r - s), diagonal 2r/pi.
double kernel_nonrel(double r, double s) noexcept;

/// Dispatches on eps.nonrelativistic().
double kernel(double r, double s, EpsilonParams eps);

/// Non-owning view of a dense symmetric row-major matrix.
struct SymmetricView {
    std::size_t n = 0;
    std::span<const double> entries;

    double operator()(std::size_t i, std::size_t j) const { return entries[i * n + j]; }
};

/// entries[i*n + j] = sqrt(w_i) K(r_i, r_j) sqrt(w_j).
struct KernelMatrix {
    EpsilonParams eps;
    QuadGrid grid;
    std::vector<double> entries;
    std::vector<double> sqrt_weights;
    bool symmetrized = true;

    std::size_t size() const noexcept { return grid.size(); }
    double operator()(std::size_t i, std::size_t j) const { return entries[i * size() + j]; }
    SymmetricView view() const { return {size(), entries}; }
};

KernelMatrix assemble(EpsilonParams eps, const QuadGrid& grid);

/// Row-major dump, one row per line, 17 significant digits.
void write_matrix_csv(const KernelMatrix& m, const std::string& path);

} // namespace backflow
