#include "backflow/eigensolver.hpp"

#include "backflow/simd.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace backflow {

SolverError::SolverError(const std::string& what, double best_lambda, double residual,
                         std::vector<RefinementLevel> levels)
    : std::runtime_error(what), best_lambda_(best_lambda), residual_(residual), levels_(std::move(levels)) {}

namespace {

double normalize(std::vector<double>& v) {
    const double norm = std::sqrt(simd::dot(v, v));
    if (norm > 0.0) {
        for (double& x : v) x /= norm;
    }
    return norm;
}

void fix_sign(std::vector<double>& v) {
    if (v.empty()) return;
    auto it = std::max_element(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (*it < 0.0) {
        for (double& x : v) x = -x;
    }
}

double inf_norm_bound(SymmetricView m) {
    double best = 0.0;
    for (std::size_t i = 0; i < m.n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < m.n; ++j) row += std::abs(m(i, j));
        best = std::max(best, row);
    }
    return best;
}

} // namespace

EigenPair smallest_eig(SymmetricView m, double tol, int max_iter, std::span<const double> start) {
    if (!(tol > 0.0)) throw std::domain_error("smallest_eig: tol must be > 0");
    if (max_iter < 1) throw std::domain_error("smallest_eig: max_iter must be >= 1");
    const std::size_t n = m.n;
    if (n == 0 || m.entries.size() != n * n) throw std::invalid_argument("smallest_eig: bad matrix");

    std::vector<double> x(n);
    if (!start.empty()) {
        if (start.size() != n) throw std::invalid_argument("smallest_eig: start vector size mismatch");
        std::copy(start.begin(), start.end(), x.begin());
    } else {
        // Generic vector with no special symmetry, so it overlaps every eigenvector.
        for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.5 * std::sin(1.0 + 0.7 * static_cast<double>(i));
    }
    if (normalize(x) == 0.0) throw std::domain_error("smallest_eig: zero start vector");

    const double sigma = 1.0 + inf_norm_bound(m);
    std::vector<double> y(n);
    double lambda = 0.0;
    double residual = std::numeric_limits<double>::infinity();

    for (int it = 1; it <= max_iter; ++it) {
        simd::gemv(m.entries, n, x, y);
        lambda = simd::dot(x, y);
        residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) residual = std::max(residual, std::abs(y[i] - lambda * x[i]));
        if (residual <= tol) {
            EigenPair out{lambda, std::move(x), it, residual};
            fix_sign(out.vector);
            return out;
        }
        for (std::size_t i = 0; i < n; ++i) x[i] = sigma * x[i] - y[i];
        normalize(x);
    }
    throw SolverError("smallest_eig: no convergence after " + std::to_string(max_iter) + " iterations",
                      lambda, residual);
}

EigenPair smallest_eig(const KernelMatrix& m, double tol, int max_iter, std::span<const double> start) {
    return smallest_eig(m.view(), tol, max_iter, start);
}

double extrapolate_levels(std::span<const RefinementLevel> levels) {
    if (levels.size() < 3) throw std::invalid_argument("extrapolate_levels: need at least 3 levels");
    // Normal equations for the 3-parameter model.
    std::array<std::array<double, 4>, 3> a{};
    for (const auto& lv : levels) {
        const std::array<double, 3> phi{1.0, 1.0 / lv.upper, lv.spacing * lv.spacing};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) a[i][j] += phi[i] * phi[j];
            a[i][3] += phi[i] * lv.lambda;
        }
    }
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        }
        std::swap(a[col], a[piv]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
        }
    }
    return a[0][3] / a[0][0];
}

std::vector<double> resample_eta(const QuadGrid& from, std::span<const double> eta, const QuadGrid& to) {
    std::vector<double> out(to.size());
    const std::size_t n = from.size();
    const double step = from.spacing();
    for (std::size_t k = 0; k < to.size(); ++k) {
        const double r = to.nodes[k];
        if (r >= from.upper()) {
            out[k] = eta[n - 1] * from.upper() / std::max(r, from.upper());
            continue;
        }
        const auto i = std::min(static_cast<std::size_t>(r / step), n - 2);
        const double t = (r - from.nodes[i]) / (from.nodes[i + 1] - from.nodes[i]);
        out[k] = (1.0 - t) * eta[i] + t * eta[i + 1];
    }
    return out;
}

namespace {

EigenSolution finish(EpsilonParams eps, const KernelMatrix& m, EigenPair pair) {
    EigenSolution sol;
    sol.eps = eps;
    sol.lambda = pair.lambda;
    sol.lambda_grid = pair.lambda;
    sol.grid = m.grid;
    sol.h_final = m.grid.h;
    sol.iterations = pair.iterations;
    sol.residual = pair.residual;
    // v is unit in the symmetrised coordinates, so eta = v / sqrt(w) has unit
    // weighted norm.
    sol.eta.resize(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) sol.eta[i] = pair.vector[i] / m.sqrt_weights[i];
    return sol;
}

std::vector<double> symmetrised_start(const KernelMatrix& m, std::span<const double> eta) {
    std::vector<double> v(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) v[i] = m.sqrt_weights[i] * eta[i];
    return v;
}

} // namespace

EigenSolution solve_on_grid(EpsilonParams eps, const QuadGrid& grid, double tol, int max_iter,
                            std::span<const double> start_eta) {
    const KernelMatrix m = assemble(eps, grid);
    std::vector<double> seed;
    if (start_eta.empty()) {
        seed.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) seed[i] = std::exp(-grid.nodes[i]);
    } else {
        seed.assign(start_eta.begin(), start_eta.end());
    }
    EigenSolution sol = finish(eps, m, smallest_eig(m, tol, max_iter, symmetrised_start(m, seed)));
    sol.levels.push_back({grid.h, grid.upper(), grid.spacing(), sol.lambda,
                          std::numeric_limits<double>::quiet_NaN(), sol.iterations});
    return sol;
}

EigenSolution solve_converged(EpsilonParams eps, const SolverConfig& cfg) {
    if (!(cfg.q0 > 0.0) || cfg.n0 < 2) throw std::domain_error("solve_converged: need q0 > 0 and n0 >= 2");
    if (!(cfg.eig_tol > 0.0) || !(cfg.refine_tol > 0.0)) throw std::domain_error("solve_converged: tolerances must be > 0");
    if (cfg.h_max < 1) throw std::domain_error("solve_converged: h_max must be >= 1");

    std::vector<RefinementLevel> levels;
    EigenSolution current;
    int total_iterations = 0;

    for (int h = 1; h <= cfg.h_max; ++h) {
        const QuadGrid grid = build_grid(cfg.q0, cfg.n0, h);
        std::vector<double> seed;
        if (h > 1) seed = resample_eta(current.grid, current.eta, grid);

        try {
            current = solve_on_grid(eps, grid, cfg.eig_tol, cfg.max_iter, seed);
        } catch (const SolverError& e) {
            throw SolverError(e.what(), e.best_lambda(), e.residual(), levels);
        }
        total_iterations += current.iterations;

        RefinementLevel level = current.levels.front();
        if (cfg.extrapolate && levels.size() >= 2) {
            std::vector<RefinementLevel> upto = levels;
            upto.push_back(level);
            level.extrapolated = extrapolate_levels(upto);
        }
        levels.push_back(level);

        const auto estimate = [&](const RefinementLevel& lv) { return cfg.extrapolate ? lv.extrapolated : lv.lambda; };
        const std::size_t needed = cfg.extrapolate ? 4 : 2;
        if (levels.size() >= needed) {
            const double change = std::abs(estimate(levels.back()) - estimate(levels[levels.size() - 2]));
            if (change < cfg.refine_tol) {
                current.lambda = estimate(levels.back());
                current.levels = std::move(levels);
                current.iterations = total_iterations;
                return current;
            }
        }
    }
    const double best = levels.empty() ? 0.0
                        : (cfg.extrapolate && levels.size() >= 3 ? levels.back().extrapolated : levels.back().lambda);
    throw SolverError("solve_converged: refinement did not converge by h_max = " + std::to_string(cfg.h_max), best,
                      current.residual, levels);
}

EigenSolution solve_nonrel(const SolverConfig& cfg) { return solve_converged(EpsilonParams(0.0), cfg); }

} // namespace backflow
