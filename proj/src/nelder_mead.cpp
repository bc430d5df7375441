#include "backflow/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace backflow {
namespace {

void clamp_into(std::vector<double>& x, std::span<const double> lo, std::span<const double> hi) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
}

} // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, std::span<const double> lo,
                             std::span<const double> hi, const NelderMeadOptions& opts) {
    const std::size_t dim = x0.size();
    if (dim == 0 || lo.size() != dim || hi.size() != dim) throw std::invalid_argument("nelder_mead: dimension mismatch");
    for (std::size_t i = 0; i < dim; ++i) {
        if (!(hi[i] > lo[i])) throw std::invalid_argument("nelder_mead: empty box");
    }
    if (opts.max_evals < static_cast<int>(dim) + 1) throw std::invalid_argument("nelder_mead: budget too small");

    constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;

    int evals = 0;
    auto eval = [&](std::vector<double>& x) {
        clamp_into(x, lo, hi);
        ++evals;
        const double v = f(x);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };

    std::vector<std::vector<double>> pts(dim + 1, x0);
    std::vector<double> vals(dim + 1);
    clamp_into(pts[0], lo, hi);
    vals[0] = eval(pts[0]);
    for (std::size_t i = 0; i < dim; ++i) {
        auto& p = pts[i + 1];
        p = pts[0];
        const double step = opts.initial_step * (hi[i] - lo[i]);
        // Step inward when the start sits on the upper bound.
        p[i] += (p[i] + step <= hi[i]) ? step : -step;
        vals[i + 1] = eval(p);
    }

    std::vector<std::size_t> order(dim + 1);
    std::vector<double> centroid(dim), xr(dim), xe(dim), xc(dim);
    bool converged = false;

    while (evals < opts.max_evals) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[dim - 1];

        const double spread = std::abs(vals[worst] - vals[best]);
        const bool flat = spread <= opts.rel_tol * std::abs(vals[best]) + 1e-300 ||
                          (std::isfinite(vals[best]) && spread <= 1e-15);
        double size = 0.0;
        for (std::size_t k = 0; k <= dim; ++k)
            for (std::size_t i = 0; i < dim; ++i)
                size = std::max(size, std::abs(pts[k][i] - pts[best][i]) / (hi[i] - lo[i]));
        if (flat && size <= opts.x_tol) {
            converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t k = 0; k <= dim; ++k) {
            if (k == worst) continue;
            for (std::size_t i = 0; i < dim; ++i) centroid[i] += pts[k][i];
        }
        for (double& c : centroid) c /= static_cast<double>(dim);

        for (std::size_t i = 0; i < dim; ++i) xr[i] = centroid[i] + kReflect * (centroid[i] - pts[worst][i]);
        const double fr = eval(xr);

        if (fr < vals[best]) {
            for (std::size_t i = 0; i < dim; ++i) xe[i] = centroid[i] + kExpand * (xr[i] - centroid[i]);
            const double fe = evals < opts.max_evals ? eval(xe) : std::numeric_limits<double>::infinity();
            if (fe < fr) {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = xr;
            vals[worst] = fr;
            continue;
        }

        const bool outside = fr < vals[worst];
        const auto& toward = outside ? xr : pts[worst];
        for (std::size_t i = 0; i < dim; ++i) xc[i] = centroid[i] + kContract * (toward[i] - centroid[i]);
        const double fc = evals < opts.max_evals ? eval(xc) : std::numeric_limits<double>::infinity();
        if (fc < std::min(fr, vals[worst])) {
            pts[worst] = xc;
            vals[worst] = fc;
            continue;
        }

        for (std::size_t k = 0; k <= dim && evals < opts.max_evals; ++k) {
            if (k == best) continue;
            for (std::size_t i = 0; i < dim; ++i) pts[k][i] = pts[best][i] + kShrink * (pts[k][i] - pts[best][i]);
            vals[k] = eval(pts[k]);
        }
    }

    const auto it = std::min_element(vals.begin(), vals.end());
    const std::size_t idx = static_cast<std::size_t>(it - vals.begin());
    return {pts[idx], vals[idx], evals, converged};
}

} // namespace backflow
