#pragma once

#include <functional>
#include <span>
#include <vector>

namespace backflow {

struct NelderMeadOptions {
    int max_evals = 2000;
    double rel_tol = 1e-8;      // on the spread of objective values across the simplex
    double initial_step = 0.05; // fraction of each box width
    double x_tol = 1e-6;        // simplex size, as a fraction of each box width
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int evals = 0;
    bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Downhill simplex restricted to the box [lo, hi]: every candidate vertex is
/// clamped into the box before it is evaluated.
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, std::span<const double> lo,
                             std::span<const double> hi, const NelderMeadOptions& opts = {});

} // namespace backflow
