#pragma once

// Airy and Bessel trial envelopes
//
//     f(u) = F(a1 (u + a2)^a3) / (a4 u + a5)^a6,   F = Ai or J0,
//
// written in the momentum variable u = 2 p / (m c) = 2 eps r, and their
// optimisation either for maximal backflow or for the closest match to the
// numerical eigenvector.

#include "backflow/eigensolver.hpp"
#include "backflow/kernel.hpp"
#include "backflow/params.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace backflow {

enum class Family { Airy, Bessel };

std::string_view to_string(Family f) noexcept;
Family family_from_string(std::string_view s);

inline constexpr double kFixedA6 = 2.0 / 3.0;
inline constexpr double kMinA5 = 1e-6;

/// Coefficient box: -10 <= a1 <= 0, 0 <= a_j <= 10 otherwise, a5 >= 1e-6.
inline constexpr std::array<double, 6> kParamLower{-10.0, 0.0, 0.0, 0.0, kMinA5, 0.0};
inline constexpr std::array<double, 6> kParamUpper{0.0, 10.0, 10.0, 10.0, 10.0, 10.0};

struct TrialParams {
    Family family = Family::Bessel;
    std::array<double, 6> a{};
    bool a6_fixed = false;

    /// Throws std::domain_error outside the box or when a6_fixed with a6 != 2/3.
    void validate() const;
};

/// Published Bessel optima: near eps = 0.9, and the eps = 1.0 current example.
inline constexpr std::array<double, 6> kBesselOptimumEps09{-1.347, 0.603, 0.986, 0.341, 0.435, 0.715};
inline constexpr std::array<double, 6> kBesselCurrentEps10{-1.176, 0.763, 0.971, 0.332, 0.445, 0.751};

/// u = 2 eps r.
double trial_variable(double r, EpsilonParams eps) noexcept;

/// f(u); validates the parameters.
double trial_eval(const TrialParams& p, double u);

/// f(2 eps r_i) on every grid node (no validation, no normalisation).
std::vector<double> sample_trial(const TrialParams& p, const QuadGrid& grid, EpsilonParams eps);

/// Rayleigh quotient of an arbitrary real profile; throws std::domain_error
/// when its weighted norm is below 1e-12 or not finite.
double backflow_of_samples(std::span<const double> profile, const KernelMatrix& m);

/// Backflow achieved by the normalised trial on the matrix grid.
double backflow_of_trial(const TrialParams& p, const KernelMatrix& m);

/// Uniform grid used for fitting: [0, length] with `nodes` points.
struct FitGrid {
    double length = 30.0;
    int nodes = 301;
    QuadGrid build() const { return build_grid(length, nodes, 1); }
};

struct FitOptions {
    int restarts = 5000;
    std::uint64_t seed = 0;
    bool a6_fixed = false;
    int max_evals = 2000;  // per restart
    double rel_tol = 1e-8; // on the objective
    bool weighted_residual = true;
    std::vector<std::array<double, 6>> warm_starts; // tried before the random draws
};

struct FitResult {
    TrialParams params;
    double delta = 0.0;             // backflow of the normalised trial
    std::optional<double> residual; // match mode only
    double lambda = 0.0;            // smallest eigenvalue of the same matrix
    int restarts_used = 0;
    std::uint64_t seed = 0;
    std::vector<double> trace;      // best objective after each restart
};

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Minimises the backflow Delta (most negative flux) over the box.
FitResult maximize_backflow(Family family, const KernelMatrix& m, const FitOptions& opts);
FitResult maximize_backflow(Family family, EpsilonParams eps, const FitOptions& opts, const FitGrid& grid = {});

/// Least-squares match of the normalised, sign-aligned trial to sol.eta on
/// sol.grid; `m` must be assembled on that grid.
FitResult match_eigenvector(Family family, const EigenSolution& sol, const KernelMatrix& m, const FitOptions& opts);
FitResult match_eigenvector(Family family, const EigenSolution& sol, const FitOptions& opts);

/// Mean squared deviation between the normalised profile and eta, after the
/// better of the two sign choices.
double match_residual(std::span<const double> profile, const EigenSolution& sol, bool weighted = true);

/// Per-restart generator: independent of how restarts are scheduled.
std::array<double, 6> draw_start(std::uint64_t seed, int restart, bool a6_fixed);

} // namespace backflow
