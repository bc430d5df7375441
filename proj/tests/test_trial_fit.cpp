#include "backflow/current.hpp"
#include "backflow/eigensolver.hpp"
#include "backflow/special_functions.hpp"
#include "backflow/trial_fit.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

using namespace backflow;

namespace {

EigenSolution fit_grid_solution(double eps) {
    return solve_on_grid(EpsilonParams(eps), FitGrid{}.build(), 1e-10, 1000000);
}

FitOptions quick(int restarts, std::uint64_t seed = 42) {
    FitOptions o;
    o.restarts = restarts;
    o.seed = seed;
    o.max_evals = 600;
    return o;
}

} // namespace

TEST_CASE("family names") {
    CHECK(to_string(Family::Airy) == "airy");
    CHECK(family_from_string("bessel") == Family::Bessel);
    CHECK_THROWS(family_from_string("fresnel"));
}

TEST_CASE("constant Bessel trial") {
    TrialParams p{Family::Bessel, {0.0, 3.0, 2.0, 0.0, 1.0, 4.0}, false};
    for (double u : {0.0, 0.5, 3.0, 40.0}) CHECK(trial_eval(p, u) == 1.0);
}

TEST_CASE("Airy trial vanishes at the first Airy zero") {
    TrialParams p{Family::Airy, {-1.0, 0.0, 1.0, 0.0, 1.0, 0.0}, false};
    CHECK(std::abs(trial_eval(p, 2.338107410)) <= 1e-6);
    CHECK(trial_eval(p, 0.0) == doctest::Approx(airy_ai(0.0)));
}

TEST_CASE("reference Bessel vector oscillates with decaying amplitude") {
    TrialParams p{Family::Bessel, kBesselOptimumEps09, false};
    std::vector<double> f;
    for (double u = 0.0; u <= 20.0; u += 0.01) f.push_back(trial_eval(p, u));
    int changes = 0;
    for (std::size_t i = 1; i < f.size(); ++i) changes += (f[i] > 0) != (f[i - 1] > 0);
    CHECK(changes >= 3);
    for (double v : f) CHECK(std::isfinite(v));
    const auto half = f.begin() + static_cast<std::ptrdiff_t>(f.size() / 2);
    const auto amp = [](double a, double b) { return std::abs(a) < std::abs(b); };
    CHECK(std::abs(*std::max_element(half, f.end(), amp)) < std::abs(*std::max_element(f.begin(), half, amp)));
}

TEST_CASE("parameter box is enforced") {
    TrialParams p{Family::Bessel, kBesselOptimumEps09, false};
    CHECK_NOTHROW(p.validate());
    p.a[0] = 0.5;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
    p.a = kBesselOptimumEps09;
    p.a[4] = 0.0;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
    p.a = kBesselOptimumEps09;
    p.a6_fixed = true;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
    p.a[5] = kFixedA6;
    CHECK_NOTHROW(p.validate());
    CHECK_THROWS_AS(trial_eval(p, -1.0), std::domain_error);
}

TEST_CASE("trial variable") {
    CHECK(trial_variable(1.5, EpsilonParams(0.9)) == doctest::Approx(2.7));
}

TEST_CASE("backflow of the eigenvector samples is the grid eigenvalue") {
    const EigenSolution sol = fit_grid_solution(1.0);
    const KernelMatrix m = assemble(sol.eps, sol.grid);
    CHECK(backflow_of_samples(sol.eta, m) == doctest::Approx(sol.lambda_grid).epsilon(1e-9));
    std::vector<double> scaled(sol.eta);
    for (double& v : scaled) v *= -3.7;
    CHECK(backflow_of_samples(scaled, m) == doctest::Approx(sol.lambda_grid).epsilon(1e-9));
    CHECK_THROWS_AS(backflow_of_samples(std::vector<double>(m.size(), 0.0), m), std::domain_error);
}

TEST_CASE("random trials respect the variational bound") {
    const EigenSolution sol = fit_grid_solution(0.7);
    const KernelMatrix m = assemble(sol.eps, sol.grid);
    for (Family fam : {Family::Airy, Family::Bessel}) {
        for (int k = 0; k < 200; ++k) {
            const TrialParams p{fam, draw_start(3, k, false), false};
            double d = 0.0;
            try {
                d = backflow_of_trial(p, m);
            } catch (const std::domain_error&) {
                continue;
            }
            CHECK(d >= sol.lambda_grid - 1e-12);
        }
    }
}

TEST_CASE("reference Bessel vector at eps = 0.9 is near the optimum") {
    const KernelMatrix m = assemble(EpsilonParams(0.9), FitGrid{}.build());
    const double lambda = smallest_eig(m, 1e-10, 1000000).lambda;
    const double delta = backflow_of_trial(TrialParams{Family::Bessel, kBesselOptimumEps09, false}, m);
    CHECK(delta < 0.0);
    CHECK(delta >= lambda);
    CHECK(delta / lambda >= 0.97);
}

TEST_CASE("start draws are seeded per restart") {
    const auto a = draw_start(42, 7, false);
    CHECK(a == draw_start(42, 7, false));
    CHECK(a != draw_start(42, 8, false));
    CHECK(a != draw_start(43, 7, false));
    const auto fixed = draw_start(42, 7, true);
    CHECK(fixed[5] == kFixedA6);
    for (std::size_t j = 0; j < 5; ++j) CHECK(fixed[j] == a[j]);
    for (int k = 0; k < 500; ++k) {
        const auto d = draw_start(1, k, false);
        for (std::size_t j = 0; j < 6; ++j) {
            CHECK(d[j] >= kParamLower[j]);
            CHECK(d[j] <= kParamUpper[j]);
        }
    }
}

TEST_CASE("maximize is deterministic, bounded and monotone") {
    const KernelMatrix m = assemble(EpsilonParams(1.2), FitGrid{}.build());
    const FitResult a = maximize_backflow(Family::Bessel, m, quick(6));
    const FitResult b = maximize_backflow(Family::Bessel, m, quick(6));
    CHECK(a.params.a == b.params.a);
    CHECK(a.delta == b.delta);
    CHECK(a.trace == b.trace);
    CHECK(a.restarts_used == 6);
    CHECK(a.seed == 42);
    CHECK_FALSE(a.residual.has_value());
    CHECK(a.delta < 0.0);
    CHECK(a.delta >= a.lambda - 1e-12);
    REQUIRE(a.trace.size() == 6);
    for (std::size_t k = 1; k < a.trace.size(); ++k) CHECK(a.trace[k] <= a.trace[k - 1]);
    CHECK(a.trace.back() == doctest::Approx(a.delta).epsilon(1e-12));
}

TEST_CASE("warm start with the reference vector") {
    const KernelMatrix m = assemble(EpsilonParams(0.9), FitGrid{}.build());
    FitOptions o = quick(1);
    o.warm_starts = {kBesselOptimumEps09};
    const FitResult r = maximize_backflow(Family::Bessel, m, o);
    const double reference = backflow_of_trial(TrialParams{Family::Bessel, kBesselOptimumEps09, false}, m);
    CHECK(r.delta <= reference + 1e-12);
    CHECK(r.restarts_used == 2);
}

TEST_CASE("fixing a6 cannot beat the free search in maximize mode") {
    const KernelMatrix m = assemble(EpsilonParams(1.0), FitGrid{}.build());
    const FitResult free = maximize_backflow(Family::Bessel, m, quick(8));
    FitOptions o = quick(8);
    o.a6_fixed = true;
    const FitResult fixed = maximize_backflow(Family::Bessel, m, o);
    CHECK(fixed.params.a[5] == kFixedA6);
    CHECK(fixed.params.a6_fixed);
    CHECK(std::abs(fixed.delta) <= std::abs(free.delta) + 1e-9);
}

TEST_CASE("self-fit recovers a family member") {
    const EpsilonParams eps(1.0);
    const QuadGrid grid = FitGrid{}.build();
    const TrialParams truth{Family::Bessel, kBesselCurrentEps10, false};
    EigenSolution target;
    target.eps = eps;
    target.grid = grid;
    target.eta = sample_trial(truth, grid, eps);
    double norm = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) norm += grid.weights[i] * target.eta[i] * target.eta[i];
    for (double& v : target.eta) v /= std::sqrt(norm);
    const KernelMatrix m = assemble(eps, grid);
    target.lambda = target.lambda_grid = smallest_eig(m, 1e-10, 1000000).lambda;

    FitOptions o = quick(1);
    o.max_evals = 4000;
    auto start = kBesselCurrentEps10;
    for (double& v : start) v *= 1.03;
    o.warm_starts = {start};
    const FitResult r = match_eigenvector(Family::Bessel, target, m, o);
    REQUIRE(r.residual.has_value());
    CHECK(*r.residual <= 1e-8);
    CHECK(r.delta == doctest::Approx(backflow_of_samples(target.eta, m)).epsilon(1e-4));
    CHECK(match_residual(target.eta, target) <= 1e-20);
}

TEST_CASE("match residual is sign blind and has a plain variant") {
    const EigenSolution sol = fit_grid_solution(1.0);
    std::vector<double> flipped(sol.eta);
    for (double& v : flipped) v = -2.0 * v;
    CHECK(match_residual(flipped, sol) <= 1e-20);
    CHECK(match_residual(flipped, sol, false) <= 1e-20);
    std::vector<double> other(sol.eta.size());
    for (std::size_t i = 0; i < other.size(); ++i) other[i] = std::exp(-sol.grid.nodes[i]);
    CHECK(match_residual(other, sol) > 0.0);
}

TEST_CASE("match mode is deterministic and bounded") {
    const EigenSolution sol = fit_grid_solution(1.0);
    const KernelMatrix m = assemble(sol.eps, sol.grid);
    const FitResult a = match_eigenvector(Family::Bessel, sol, m, quick(4, 7));
    const FitResult b = match_eigenvector(Family::Bessel, sol, m, quick(4, 7));
    CHECK(a.params.a == b.params.a);
    CHECK(a.residual == b.residual);
    CHECK(a.delta >= sol.lambda_grid - 1e-12);
    CHECK(a.lambda == sol.lambda_grid);
    for (std::size_t k = 1; k < a.trace.size(); ++k) CHECK(a.trace[k] <= a.trace[k - 1]);
}

TEST_CASE("fit preconditions") {
    const KernelMatrix m = assemble(EpsilonParams(1.0), build_grid(3.0, 30, 1));
    CHECK_THROWS_AS(maximize_backflow(Family::Airy, m, quick(0)), std::domain_error);
    const KernelMatrix nr = assemble(EpsilonParams(0.0), build_grid(3.0, 30, 1));
    CHECK_THROWS_AS(maximize_backflow(Family::Airy, nr, quick(1)), std::domain_error);
}
