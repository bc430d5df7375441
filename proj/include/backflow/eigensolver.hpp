#pragma once

#include "backflow/kernel.hpp"
#include "backflow/params.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace backflow {

/// Unit eigenvector (2-norm) of a symmetric matrix with its eigenvalue.
/// The largest-magnitude component of `vector` is positive.
struct EigenPair {
    double lambda = 0.0;
    std::vector<double> vector;
    int iterations = 0;
    double residual = 0.0; // max_i |(M v)_i - lambda v_i|
};

/// One level of the grid-refinement protocol.
struct RefinementLevel {
    int h = 0;
    double upper = 0.0;
    double spacing = 0.0;
    double lambda = 0.0;       // eigenvalue of the level-h matrix
    double extrapolated = 0.0; // continuum estimate from levels 1..h (NaN for h < 3)
    int iterations = 0;
};

/// Thrown when an iteration budget runs out. Carries the best estimate so
/// callers can still report it.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double best_lambda, double residual,
                std::vector<RefinementLevel> levels = {});

    double best_lambda() const noexcept { return best_lambda_; }
    double residual() const noexcept { return residual_; }
    const std::vector<RefinementLevel>& levels() const noexcept { return levels_; }

private:
    double best_lambda_;
    double residual_;
    std::vector<RefinementLevel> levels_;
};

/// Algebraically smallest eigenpair by power iteration on (sigma I - M) with
/// sigma = 1 + ||M||_inf. Stops when the residual drops to `tol`.
/// `start` seeds the iteration; an empty span uses a fixed generic vector.
EigenPair smallest_eig(SymmetricView m, double tol, int max_iter, std::span<const double> start = {});
EigenPair smallest_eig(const KernelMatrix& m, double tol, int max_iter, std::span<const double> start = {});

struct SolverConfig {
    double q0 = 6.0;
    int n0 = 200;
    double eig_tol = 1e-8;
    double refine_tol = 5e-5;
    int h_max = 16;
    int max_iter = 200000;
    // Report the continuum estimate (fit of lambda_h against 1/upper and
    // spacing^2) and test convergence on it. When false the raw level
    // eigenvalues are compared directly.
    bool extrapolate = true;
};

struct EigenSolution {
    EpsilonParams eps;
    double lambda = 0.0;      // reported (continuum) eigenvalue
    double lambda_grid = 0.0; // eigenvalue of the final-grid matrix, pairs with eta
    std::vector<double> eta;  // sum_i w_i eta_i^2 = 1, largest |eta_i| positive
    QuadGrid grid;
    int h_final = 1;
    int iterations = 0;       // summed over levels
    double residual = 0.0;    // final level, symmetrised coordinates
    std::vector<RefinementLevel> levels;
};

/// Single-grid solve; lambda == lambda_grid.
EigenSolution solve_on_grid(EpsilonParams eps, const QuadGrid& grid, double tol, int max_iter,
                            std::span<const double> start_eta = {});

/// Refines h = 1, 2, ... until the estimate moves by less than refine_tol.
EigenSolution solve_converged(EpsilonParams eps, const SolverConfig& cfg = {});

/// Same protocol on the non-relativistic kernel.
EigenSolution solve_nonrel(const SolverConfig& cfg = {});

/// Least-squares fit lambda_h = a + b / upper_h + c spacing_h^2 over the levels;
/// returns a. Needs at least three levels.
double extrapolate_levels(std::span<const RefinementLevel> levels);

/// Piecewise-linear resampling of eta onto new nodes; beyond the old range the
/// last value is continued with 1/r decay.
std::vector<double> resample_eta(const QuadGrid& from, std::span<const double> eta, const QuadGrid& to);

} // namespace backflow
