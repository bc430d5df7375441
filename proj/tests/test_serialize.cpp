#include "backflow/serialize.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace backflow;

TEST_CASE("eigen solution round trip") {
    SolverConfig cfg;
    cfg.n0 = 60;
    const EigenSolution sol = solve_converged(EpsilonParams(1.4), cfg);
    const nlohmann::json j = to_json(sol);
    for (const char* key : {"epsilon", "lambda", "h_final", "iterations", "residual", "grid", "eta", "nodes"}) {
        CHECK(j.contains(key));
    }
    const EigenSolution back = eigen_solution_from_json(nlohmann::json::parse(j.dump()));
    CHECK(back.eps == sol.eps);
    CHECK(back.lambda == sol.lambda);
    CHECK(back.lambda_grid == sol.lambda_grid);
    CHECK(back.h_final == sol.h_final);
    CHECK(back.iterations == sol.iterations);
    CHECK(back.residual == sol.residual);
    CHECK(back.eta == sol.eta);
    CHECK(back.grid.nodes == sol.grid.nodes);
    CHECK(back.grid.weights == sol.grid.weights);
    REQUIRE(back.levels.size() == sol.levels.size());
    for (std::size_t i = 0; i < sol.levels.size(); ++i) {
        CHECK(back.levels[i].lambda == sol.levels[i].lambda);
        const double e0 = sol.levels[i].extrapolated, e1 = back.levels[i].extrapolated;
        CHECK(((std::isnan(e0) && std::isnan(e1)) || e0 == e1));
    }
}

TEST_CASE("trial params round trip") {
    const TrialParams p{Family::Airy, {-1.25, 0.5, 1.0, 0.0, 0.75, kFixedA6}, true};
    const TrialParams q = trial_params_from_json(nlohmann::json::parse(to_json(p).dump()));
    CHECK(q.family == p.family);
    CHECK(q.a == p.a);
    CHECK(q.a6_fixed);
}

TEST_CASE("fit result round trip with trace") {
    FitResult r;
    r.params = TrialParams{Family::Bessel, kBesselOptimumEps09, false};
    r.delta = -0.0251;
    r.residual = 1.5e-5;
    r.lambda = -0.026;
    r.restarts_used = 3;
    r.seed = 0xFFFFFFFFFFFFULL;
    r.trace = {std::numeric_limits<double>::infinity(), -0.02, -0.0251};
    const FitResult s = fit_result_from_json(nlohmann::json::parse(to_json(r, true).dump()));
    CHECK(s.params.a == r.params.a);
    CHECK(s.delta == r.delta);
    CHECK(s.residual == r.residual);
    CHECK(s.lambda == r.lambda);
    CHECK(s.restarts_used == 3);
    CHECK(s.seed == r.seed);
    CHECK(s.trace == r.trace);

    r.residual.reset();
    const nlohmann::json j = to_json(r, false);
    CHECK(j.at("residual").is_null());
    CHECK_FALSE(j.contains("trace"));
    CHECK_FALSE(fit_result_from_json(j).residual.has_value());
}
