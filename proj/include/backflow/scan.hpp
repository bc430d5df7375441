#pragma once

#include "backflow/eigensolver.hpp"
#include "backflow/params.hpp"
#include "backflow/trial_fit.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace backflow {

inline constexpr double kBackflowConstant = 0.0384517;
inline constexpr double kFineStructure = 0.0072973525693;

/// c_bf exp(-(4 eps / 9)(1 - 4 alpha eps)), a positive magnitude.
double closed_form_flux(EpsilonParams eps);

/// Backflow of the six fitted trials at one eps (NaN where not computed).
struct FitDeltas {
    double airy_max = std::numeric_limits<double>::quiet_NaN();
    double airy_match = std::numeric_limits<double>::quiet_NaN();
    double airy_match_a6 = std::numeric_limits<double>::quiet_NaN();
    double bessel_max = std::numeric_limits<double>::quiet_NaN();
    double bessel_match = std::numeric_limits<double>::quiet_NaN();
    double bessel_match_a6 = std::numeric_limits<double>::quiet_NaN();
    // Eigenvalue of the fitting-grid matrix the six values are bounded by.
    double grid_lambda = std::numeric_limits<double>::quiet_NaN();
};

struct ScanRow {
    double epsilon = 0.0;
    double lambda = std::numeric_limits<double>::quiet_NaN(); // negative
    double model = 0.0;   // -closed_form_flux, sign-matched to lambda
    double rel_err = std::numeric_limits<double>::quiet_NaN();
    std::optional<FitDeltas> fits;
    std::string error;    // non-empty when this row's solve failed
};

/// 0.1, 0.2, ..., 2.5
std::vector<double> default_scan_epsilons();

std::vector<ScanRow> eigen_scan(std::span<const double> eps_list, const SolverConfig& cfg);

struct FitScanConfig {
    std::vector<Family> families{Family::Airy, Family::Bessel};
    int restarts = 200;
    std::uint64_t seed = 0;
    FitGrid grid;
    int max_evals = 2000;
};

/// eigen_scan plus, per eps and family, the maximise / match / match-with-a6
/// campaigns on the fitting grid.
std::vector<ScanRow> fit_scan(std::span<const double> eps_list, const SolverConfig& cfg, const FitScanConfig& fit);

/// Header `epsilon,lambda,model,rel_err` plus the six fit columns when
/// `with_fits`; missing values are written as `nan`.
void write_scan_csv(std::span<const ScanRow> rows, bool with_fits, std::ostream& out);

} // namespace backflow
