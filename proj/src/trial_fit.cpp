#include "backflow/trial_fit.hpp"

#include "backflow/nelder_mead.hpp"
#include "backflow/simd.hpp"
#include "backflow/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace backflow {

std::string_view to_string(Family f) noexcept { return f == Family::Airy ? "airy" : "bessel"; }

Family family_from_string(std::string_view s) {
    if (s == "airy") return Family::Airy;
    if (s == "bessel") return Family::Bessel;
    throw std::invalid_argument("unknown trial family: " + std::string(s));
}

void TrialParams::validate() const {
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (!std::isfinite(a[j]) || a[j] < kParamLower[j] || a[j] > kParamUpper[j]) {
            throw std::domain_error("trial parameter a" + std::to_string(j + 1) + " outside its box");
        }
    }
    if (a6_fixed && a[5] != kFixedA6) throw std::domain_error("a6_fixed requires a6 = 2/3");
}

double trial_variable(double r, EpsilonParams eps) noexcept { return 2.0 * eps.value() * r; }

namespace {

inline double eval_unchecked(Family family, const std::array<double, 6>& a, double u) {
    const double x = a[0] * std::pow(u + a[1], a[2]);
    const double f = family == Family::Airy ? airy_ai(x) : bessel_j0(x);
    return f / std::pow(a[3] * u + a[4], a[5]);
}

void sample_into(Family family, const std::array<double, 6>& a, const QuadGrid& grid, EpsilonParams eps,
                 std::vector<double>& out) {
    out.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double u = trial_variable(grid.nodes[i], eps);
        const double x = a[0] * std::pow(u + a[1], a[2]);
        if (!std::isfinite(x)) {
            out[i] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        const double f = family == Family::Airy ? airy_ai(x) : bessel_j0(x);
        out[i] = f / std::pow(a[3] * u + a[4], a[5]);
    }
}

// Scales the profile to unit max-norm in place. False when it is zero or
// not finite.
bool rescale(std::vector<double>& p) {
    double big = 0.0;
    for (double v : p) {
        if (!std::isfinite(v)) return false;
        big = std::max(big, std::abs(v));
    }
    if (!(big > 0.0)) return false;
    for (double& v : p) v /= big;
    return true;
}

// Rayleigh quotient of an already rescaled profile.
double quotient(std::span<const double> profile, const KernelMatrix& m, std::vector<double>& v, std::vector<double>& mv) {
    const std::size_t n = m.size();
    v.resize(n);
    mv.resize(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = m.sqrt_weights[i] * profile[i];
    const double vv = simd::dot(v, v);
    simd::gemv(m.entries, n, v, mv);
    return simd::dot(v, mv) / vv;
}

double residual_of_rescaled(std::span<const double> profile, const EigenSolution& sol, bool weighted) {
    const QuadGrid& g = sol.grid;
    const std::size_t n = g.size();
    const auto& kern = simd::active();
    if (weighted) {
        const double norm = std::sqrt(kern.weighted_sq_diff(g.weights.data(), profile.data(), profile.data(), 0.0, n));
        std::vector<double> t(profile.begin(), profile.end());
        for (double& x : t) x /= norm;
        const double plus = kern.weighted_sq_diff(g.weights.data(), t.data(), sol.eta.data(), 1.0, n);
        const double minus = kern.weighted_sq_diff(g.weights.data(), t.data(), sol.eta.data(), -1.0, n);
        return std::min(plus, minus) / g.upper();
    }
    // Plain least squares: both profiles normalised in the ordinary 2-norm
    // over the nodes, then averaged per node.
    const std::vector<double> ones(n, 1.0);
    const double tn = std::sqrt(kern.weighted_sq_diff(ones.data(), profile.data(), profile.data(), 0.0, n));
    const double en = std::sqrt(kern.weighted_sq_diff(ones.data(), sol.eta.data(), sol.eta.data(), 0.0, n));
    std::vector<double> t(n), e(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = profile[i] / tn;
        e[i] = sol.eta[i] / en;
    }
    const double plus = kern.weighted_sq_diff(ones.data(), t.data(), e.data(), 1.0, n);
    const double minus = kern.weighted_sq_diff(ones.data(), t.data(), e.data(), -1.0, n);
    return std::min(plus, minus) / static_cast<double>(n);
}

constexpr double kDegenerateBackflow = 1.0; // no profile has flux above 1
constexpr double kDegenerateResidual = 1e3;

double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

struct Candidate {
    std::array<double, 6> a{};
    double value = std::numeric_limits<double>::infinity();
};

bool better(const Candidate& c, const Candidate& best) {
    if (c.value < best.value) return true;
    if (c.value > best.value) return false;
    return c.a < best.a;
}

// Restarted downhill simplex within one evaluation budget.
template <class F>
Candidate local_search(F&& objective, const std::array<double, 6>& start, bool a6_fixed, const FitOptions& opts) {
    const std::size_t dim = a6_fixed ? 5 : 6;
    std::vector<double> lo(kParamLower.begin(), kParamLower.begin() + dim);
    std::vector<double> hi(kParamUpper.begin(), kParamUpper.begin() + dim);

    auto expand = [&](std::span<const double> x) {
        std::array<double, 6> a{};
        std::copy(x.begin(), x.end(), a.begin());
        if (a6_fixed) a[5] = kFixedA6;
        return a;
    };
    const Objective f = [&](std::span<const double> x) { return objective(expand(x)); };

    std::vector<double> x(start.begin(), start.begin() + dim);
    int budget = opts.max_evals;
    Candidate best;
    NelderMeadOptions nm;
    nm.rel_tol = opts.rel_tol;
    while (budget > static_cast<int>(dim) + 1) {
        nm.max_evals = budget;
        const NelderMeadResult res = nelder_mead(f, x, lo, hi, nm);
        budget -= res.evals;
        const double improvement = best.value - res.value;
        if (res.value < best.value) {
            best.value = res.value;
            best.a = expand(res.x);
        }
        x = res.x;
        if (!res.converged) break;
        if (std::isfinite(improvement) && improvement <= opts.rel_tol * std::abs(best.value)) break;
        nm.initial_step = 0.01; // re-expand around the optimum with a smaller simplex
    }
    return best;
}

template <class F>
FitResult run_restarts(Family family, F&& objective, const FitOptions& opts, double degenerate_value) {
    if (opts.restarts < 1) throw std::domain_error("restarts must be >= 1");
    FitResult out;
    out.seed = opts.seed;
    Candidate best;
    const int total = static_cast<int>(opts.warm_starts.size()) + opts.restarts;
    for (int k = 0; k < total; ++k) {
        std::array<double, 6> start;
        if (k < static_cast<int>(opts.warm_starts.size())) {
            start = opts.warm_starts[static_cast<std::size_t>(k)];
            for (std::size_t j = 0; j < 6; ++j) start[j] = std::clamp(start[j], kParamLower[j], kParamUpper[j]);
            if (opts.a6_fixed) start[5] = kFixedA6;
        } else {
            start = draw_start(opts.seed, k - static_cast<int>(opts.warm_starts.size()), opts.a6_fixed);
        }
        const Candidate c = local_search(objective, start, opts.a6_fixed, opts);
        if (c.value < degenerate_value && better(c, best)) best = c;
        out.trace.push_back(best.value);
    }
    if (!(best.value < degenerate_value)) {
        throw FitError("all " + std::to_string(total) + " restarts produced degenerate trials");
    }
    out.params = TrialParams{family, best.a, opts.a6_fixed};
    out.restarts_used = total;
    return out;
}

} // namespace

double trial_eval(const TrialParams& p, double u) {
    p.validate();
    if (u < 0.0) throw std::domain_error("trial_eval: u must be >= 0");
    return eval_unchecked(p.family, p.a, u);
}

std::vector<double> sample_trial(const TrialParams& p, const QuadGrid& grid, EpsilonParams eps) {
    std::vector<double> out;
    sample_into(p.family, p.a, grid, eps, out);
    return out;
}

double backflow_of_samples(std::span<const double> profile, const KernelMatrix& m) {
    if (profile.size() != m.size()) throw std::invalid_argument("backflow_of_samples: size mismatch");
    double norm2 = 0.0;
    for (std::size_t i = 0; i < profile.size(); ++i) norm2 += m.grid.weights[i] * profile[i] * profile[i];
    if (!std::isfinite(norm2) || std::sqrt(norm2) < 1e-12) {
        throw std::domain_error("trial is numerically zero or not finite on the grid");
    }
    std::vector<double> p(profile.begin(), profile.end());
    rescale(p);
    std::vector<double> v, mv;
    return quotient(p, m, v, mv);
}

double backflow_of_trial(const TrialParams& p, const KernelMatrix& m) {
    p.validate();
    if (m.eps.nonrelativistic()) throw std::domain_error("trial families need eps > 0");
    return backflow_of_samples(sample_trial(p, m.grid, m.eps), m);
}

double match_residual(std::span<const double> profile, const EigenSolution& sol, bool weighted) {
    if (profile.size() != sol.grid.size()) throw std::invalid_argument("match_residual: size mismatch");
    std::vector<double> p(profile.begin(), profile.end());
    if (!rescale(p)) throw std::domain_error("match_residual: degenerate profile");
    return residual_of_rescaled(p, sol, weighted);
}

std::array<double, 6> draw_start(std::uint64_t seed, int restart, bool a6_fixed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(restart)};
    std::mt19937_64 gen(seq);
    std::array<double, 6> a{};
    for (std::size_t j = 0; j < 6; ++j) a[j] = kParamLower[j] + uniform01(gen) * (kParamUpper[j] - kParamLower[j]);
    if (a6_fixed) a[5] = kFixedA6;
    return a;
}

FitResult maximize_backflow(Family family, const KernelMatrix& m, const FitOptions& opts) {
    if (m.eps.nonrelativistic()) throw std::domain_error("trial families need eps > 0");
    std::vector<double> prof, v, mv;
    auto objective = [&](const std::array<double, 6>& a) {
        sample_into(family, a, m.grid, m.eps, prof);
        if (!rescale(prof)) return kDegenerateBackflow;
        const double q = quotient(prof, m, v, mv);
        return std::isfinite(q) ? q : kDegenerateBackflow;
    };
    FitResult out = run_restarts(family, objective, opts, kDegenerateBackflow);
    out.delta = objective(out.params.a);
    out.lambda = smallest_eig(m, 1e-10, 1000000).lambda;
    return out;
}

FitResult maximize_backflow(Family family, EpsilonParams eps, const FitOptions& opts, const FitGrid& grid) {
    return maximize_backflow(family, assemble(eps, grid.build()), opts);
}

FitResult match_eigenvector(Family family, const EigenSolution& sol, const KernelMatrix& m, const FitOptions& opts) {
    if (sol.eps.nonrelativistic()) throw std::domain_error("trial families need eps > 0");
    if (m.size() != sol.grid.size() || m.grid.nodes != sol.grid.nodes) {
        throw std::invalid_argument("match_eigenvector: matrix and solution grids differ");
    }
    std::vector<double> prof;
    auto objective = [&](const std::array<double, 6>& a) {
        sample_into(family, a, sol.grid, sol.eps, prof);
        if (!rescale(prof)) return kDegenerateResidual;
        const double r = residual_of_rescaled(prof, sol, opts.weighted_residual);
        return std::isfinite(r) ? r : kDegenerateResidual;
    };
    FitResult out = run_restarts(family, objective, opts, kDegenerateResidual);
    out.residual = objective(out.params.a);
    std::vector<double> v, mv;
    sample_into(family, out.params.a, sol.grid, sol.eps, prof);
    rescale(prof);
    out.delta = quotient(prof, m, v, mv);
    out.lambda = sol.lambda_grid;
    return out;
}

FitResult match_eigenvector(Family family, const EigenSolution& sol, const FitOptions& opts) {
    return match_eigenvector(family, sol, assemble(sol.eps, sol.grid), opts);
}

} // namespace backflow
