#include "backflow/serialize.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace backflow {

using nlohmann::json;

namespace {

// JSON has no NaN; store it as null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

} // namespace

json to_json(const EigenSolution& sol) {
    json levels = json::array();
    for (const auto& lv : sol.levels) {
        levels.push_back({{"h", lv.h},
                          {"upper", lv.upper},
                          {"spacing", lv.spacing},
                          {"lambda", lv.lambda},
                          {"extrapolated", number_or_null(lv.extrapolated)},
                          {"iterations", lv.iterations}});
    }
    return {{"epsilon", sol.eps.value()},
            {"lambda", sol.lambda},
            {"lambda_grid", sol.lambda_grid},
            {"h_final", sol.h_final},
            {"iterations", sol.iterations},
            {"residual", sol.residual},
            {"grid", {{"q0", sol.grid.q0}, {"n0", sol.grid.n0}, {"h", sol.grid.h}}},
            {"eta", sol.eta},
            {"nodes", sol.grid.nodes},
            {"levels", levels}};
}

EigenSolution eigen_solution_from_json(const json& j) {
    EigenSolution sol;
    sol.eps = EpsilonParams(j.at("epsilon").get<double>());
    sol.lambda = j.at("lambda").get<double>();
    sol.lambda_grid = j.value("lambda_grid", sol.lambda);
    sol.h_final = j.at("h_final").get<int>();
    sol.iterations = j.at("iterations").get<int>();
    sol.residual = j.at("residual").get<double>();
    const json& g = j.at("grid");
    sol.grid = build_grid(g.at("q0").get<double>(), g.at("n0").get<int>(), g.at("h").get<int>());
    sol.eta = j.at("eta").get<std::vector<double>>();
    // Stored nodes win over the rebuilt ones so a reload is exact.
    if (j.contains("nodes")) sol.grid.nodes = j.at("nodes").get<std::vector<double>>();
    if (sol.eta.size() != sol.grid.size()) throw std::runtime_error("eigen solution: eta/grid size mismatch");
    if (j.contains("levels")) {
        for (const json& lv : j.at("levels")) {
            sol.levels.push_back({lv.at("h").get<int>(), lv.at("upper").get<double>(), lv.at("spacing").get<double>(),
                                  lv.at("lambda").get<double>(), number_from(lv.at("extrapolated")),
                                  lv.at("iterations").get<int>()});
        }
    }
    return sol;
}

json to_json(const TrialParams& p) {
    return {{"family", std::string(to_string(p.family))}, {"a", p.a}, {"a6_fixed", p.a6_fixed}};
}

TrialParams trial_params_from_json(const json& j) {
    TrialParams p;
    p.family = family_from_string(j.at("family").get<std::string>());
    p.a = j.at("a").get<std::array<double, 6>>();
    p.a6_fixed = j.value("a6_fixed", false);
    return p;
}

json to_json(const FitResult& r, bool with_trace) {
    json j{{"params", to_json(r.params)},
           {"delta", r.delta},
           {"residual", r.residual ? json(*r.residual) : json(nullptr)},
           {"lambda", r.lambda},
           {"restarts_used", r.restarts_used},
           {"seed", r.seed}};
    if (with_trace) {
        json trace = json::array();
        for (double v : r.trace) trace.push_back(number_or_null(v));
        j["trace"] = trace;
    }
    return j;
}

FitResult fit_result_from_json(const json& j) {
    FitResult r;
    r.params = trial_params_from_json(j.at("params"));
    r.delta = j.at("delta").get<double>();
    if (!j.at("residual").is_null()) r.residual = j.at("residual").get<double>();
    r.lambda = j.at("lambda").get<double>();
    r.restarts_used = j.at("restarts_used").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("trace")) {
        for (const json& v : j.at("trace")) r.trace.push_back(v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>());
    }
    return r;
}

} // namespace backflow
