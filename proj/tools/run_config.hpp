#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "backflow/scan.hpp"

#include <json.hpp>

namespace backflow::cli {

// Every knob of every command. Commands read the subset they need.
struct RunConfig {
    // physics / solver
    double epsilon = 1.0;
    std::vector<double> epsilons = default_scan_epsilons();
    double q0 = 6.0;
    int n0 = 200;
    double eig_tol = 1e-8;
    double refine_tol = 5e-5;
    int h_max = 16;
    int max_iter = 200000;
    bool extrapolate = true;

    // current reconstruction; 0 means max(4001, ceil(40 / eps^2))
    int n_tau = 0;
    std::string trial;             // empty: use the numerical eigenvector
    std::vector<double> params;    // a1..a6 for --trial

    // fitting
    std::string family = "bessel";
    std::vector<std::string> families{"airy", "bessel"};
    std::string mode = "maximize";
    int restarts = 200;
    std::uint64_t seed = 0;
    bool fix_a6 = false;
    bool warm_start = false;
    bool plain_residual = false;
    int max_evals = 2000;
    double fit_length = 30.0;
    int fit_nodes = 301;
    bool with_fits = false;

    // output
    std::string out;
    std::string dump_matrix;
    bool verbose = false;
};

nlohmann::json to_json(const RunConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& j);

} // namespace backflow::cli
