#include "backflow/scan.hpp"

#include <cmath>
#include <cstdio>

namespace backflow {

double closed_form_flux(EpsilonParams eps) {
    const double e = eps.value();
    return kBackflowConstant * std::exp(-(4.0 * e / 9.0) * (1.0 - 4.0 * kFineStructure * e));
}

std::vector<double> default_scan_epsilons() {
    std::vector<double> out;
    for (int k = 1; k <= 25; ++k) out.push_back(k / 10.0);
    return out;
}

namespace {

ScanRow solve_row(double e, const SolverConfig& cfg) {
    ScanRow row;
    row.epsilon = e;
    try {
        const EpsilonParams eps(e);
        if (eps.nonrelativistic()) throw std::domain_error("scan epsilons must be > 0");
        row.model = -closed_form_flux(eps);
        row.lambda = solve_converged(eps, cfg).lambda;
        row.rel_err = std::abs((std::abs(row.lambda) - std::abs(row.model)) / row.model);
    } catch (const SolverError& err) {
        row.lambda = err.best_lambda();
        row.error = err.what();
    } catch (const std::exception& err) {
        row.error = err.what();
    }
    return row;
}

} // namespace

std::vector<ScanRow> eigen_scan(std::span<const double> eps_list, const SolverConfig& cfg) {
    std::vector<ScanRow> rows;
    rows.reserve(eps_list.size());
    for (double e : eps_list) rows.push_back(solve_row(e, cfg));
    return rows;
}

std::vector<ScanRow> fit_scan(std::span<const double> eps_list, const SolverConfig& cfg, const FitScanConfig& fit) {
    std::vector<ScanRow> rows = eigen_scan(eps_list, cfg);
    for (ScanRow& row : rows) {
        FitDeltas d;
        try {
            const EpsilonParams eps(row.epsilon);
            const QuadGrid grid = fit.grid.build();
            const EigenSolution sol = solve_on_grid(eps, grid, cfg.eig_tol, cfg.max_iter);
            const KernelMatrix m = assemble(eps, grid);
            d.grid_lambda = sol.lambda_grid;

            FitOptions free;
            free.restarts = fit.restarts;
            free.seed = fit.seed;
            free.max_evals = fit.max_evals;
            FitOptions fixed = free;
            fixed.a6_fixed = true;

            for (Family family : fit.families) {
                const double mx = maximize_backflow(family, m, free).delta;
                const double mt = match_eigenvector(family, sol, m, free).delta;
                const double m6 = match_eigenvector(family, sol, m, fixed).delta;
                if (family == Family::Airy) {
                    d.airy_max = mx;
                    d.airy_match = mt;
                    d.airy_match_a6 = m6;
                } else {
                    d.bessel_max = mx;
                    d.bessel_match = mt;
                    d.bessel_match_a6 = m6;
                }
            }
        } catch (const std::exception& err) {
            if (!row.error.empty()) row.error += "; ";
            row.error += err.what();
        }
        row.fits = d;
    }
    return rows;
}

void write_scan_csv(std::span<const ScanRow> rows, bool with_fits, std::ostream& out) {
    out << "epsilon,lambda,model,rel_err";
    if (with_fits) out << ",airy_max,airy_match,airy_match_a6,bessel_max,bessel_match,bessel_match_a6";
    out << '\n';
    char buf[32];
    auto field = [&](double v) {
        if (std::isnan(v)) {
            out << ",nan";
            return;
        }
        std::snprintf(buf, sizeof buf, ",%.16e", v);
        out << buf;
    };
    for (const ScanRow& row : rows) {
        std::snprintf(buf, sizeof buf, "%.16e", row.epsilon);
        out << buf;
        field(row.lambda);
        field(row.model);
        field(row.rel_err);
        if (with_fits) {
            const FitDeltas d = row.fits.value_or(FitDeltas{});
            for (double v : {d.airy_max, d.airy_match, d.airy_match_a6, d.bessel_max, d.bessel_match, d.bessel_match_a6}) {
                field(v);
            }
        }
        out << '\n';
    }
}

} // namespace backflow
