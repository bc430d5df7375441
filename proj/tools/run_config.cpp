#include "run_config.hpp"

#include <set>
#include <stdexcept>

namespace backflow::cli {

using nlohmann::json;

json to_json(const RunConfig& c) {
    return {{"epsilon", c.epsilon},
            {"epsilons", c.epsilons},
            {"q0", c.q0},
            {"n0", c.n0},
            {"eig_tol", c.eig_tol},
            {"refine_tol", c.refine_tol},
            {"h_max", c.h_max},
            {"max_iter", c.max_iter},
            {"extrapolate", c.extrapolate},
            {"n_tau", c.n_tau},
            {"trial", c.trial},
            {"params", c.params},
            {"family", c.family},
            {"families", c.families},
            {"mode", c.mode},
            {"restarts", c.restarts},
            {"seed", c.seed},
            {"fix_a6", c.fix_a6},
            {"warm_start", c.warm_start},
            {"plain_residual", c.plain_residual},
            {"max_evals", c.max_evals},
            {"fit_length", c.fit_length},
            {"fit_nodes", c.fit_nodes},
            {"with_fits", c.with_fits},
            {"out", c.out},
            {"dump_matrix", c.dump_matrix},
            {"verbose", c.verbose}};
}

namespace {

template <class T>
void read(const json& j, const char* key, T& field) {
    if (j.contains(key)) field = j.at(key).get<T>();
}

} // namespace

RunConfig run_config_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("run config must be a JSON object");
    RunConfig c;
    const json known = to_json(c);
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) throw std::invalid_argument("unknown run config key: " + key);
    }
    read(j, "epsilon", c.epsilon);
    read(j, "epsilons", c.epsilons);
    read(j, "q0", c.q0);
    read(j, "n0", c.n0);
    read(j, "eig_tol", c.eig_tol);
    read(j, "refine_tol", c.refine_tol);
    read(j, "h_max", c.h_max);
    read(j, "max_iter", c.max_iter);
    read(j, "extrapolate", c.extrapolate);
    read(j, "n_tau", c.n_tau);
    read(j, "trial", c.trial);
    read(j, "params", c.params);
    read(j, "family", c.family);
    read(j, "families", c.families);
    read(j, "mode", c.mode);
    read(j, "restarts", c.restarts);
    read(j, "seed", c.seed);
    read(j, "fix_a6", c.fix_a6);
    read(j, "warm_start", c.warm_start);
    read(j, "plain_residual", c.plain_residual);
    read(j, "max_evals", c.max_evals);
    read(j, "fit_length", c.fit_length);
    read(j, "fit_nodes", c.fit_nodes);
    read(j, "with_fits", c.with_fits);
    read(j, "out", c.out);
    read(j, "dump_matrix", c.dump_matrix);
    read(j, "verbose", c.verbose);
    return c;
}

} // namespace backflow::cli
