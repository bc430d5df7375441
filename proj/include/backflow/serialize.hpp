#pragma once

#include "backflow/eigensolver.hpp"
#include "backflow/trial_fit.hpp"

#include <json.hpp>

namespace backflow {

/// {epsilon, lambda, lambda_grid, h_final, iterations, residual,
///  grid: {q0, n0, h}, eta: [...], nodes: [...], levels: [...]}
nlohmann::json to_json(const EigenSolution& sol);
EigenSolution eigen_solution_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TrialParams& p);
TrialParams trial_params_from_json(const nlohmann::json& j);

/// The restart trace is only included when `with_trace` is set.
nlohmann::json to_json(const FitResult& r, bool with_trace);
FitResult fit_result_from_json(const nlohmann::json& j);

} // namespace backflow
