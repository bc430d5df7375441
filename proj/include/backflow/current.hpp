#pragma once

// Probability current at the origin reconstructed from a momentum envelope.
//
// Time is measured in units of the window T (tau = t / T) and the current as
// J = T j(0, t), so the flux over the window is the plain integral of J over
// [0, 1] and is directly comparable with the kernel eigenvalue.

#include "backflow/eigensolver.hpp"
#include "backflow/kernel.hpp"
#include "backflow/params.hpp"

#include <complex>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace backflow {

/// Dimensionless momentum envelope g(r_i), sum_i w_i |g_i|^2 = 1.
struct Envelope {
    QuadGrid grid;
    std::vector<std::complex<double>> values;
};

struct CurrentTrace {
    EpsilonParams eps;
    std::vector<double> taus;
    std::vector<double> J;
    double delta = 0.0; // trapezoid of J over [0, 1]
};

/// g(r) = exp(+2i gamma(r) / eps^2) eta(r). Requires eps > 0.
Envelope envelope_from_eigvec(const EigenSolution& sol);

/// Same phase convention for any real profile on a grid; the profile is
/// normalised first.
Envelope envelope_from_real(EpsilonParams eps, const QuadGrid& grid, std::span<const double> eta);

/// Spinor components of the positive-energy solutions.
double spinor_upper(double r, EpsilonParams eps) noexcept; // sqrt((gamma+1)/(2 gamma))
double spinor_lower(double r, EpsilonParams eps) noexcept; // eps r / sqrt(2 gamma (gamma+1))

/// max(4001, ceil(40 / eps^2)).
int default_n_tau(EpsilonParams eps);

CurrentTrace current_trace(const Envelope& env, EpsilonParams eps, int n_tau);

/// (v^T M v) / (v^T v) with v = sqrt(w) eta.
double rayleigh_quotient(std::span<const double> eta, const KernelMatrix& m);

/// Number of strict sign changes in J (zeros skipped).
int sign_changes(const CurrentTrace& trace);

/// Local extrema of J on the sampled tau grid.
int turning_points(const CurrentTrace& trace);

void write_current_csv(const CurrentTrace& trace, std::ostream& out);
void write_current_csv(const CurrentTrace& trace, const std::string& path);

} // namespace backflow
