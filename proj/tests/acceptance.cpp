// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include "cli.hpp"

#include "backflow/current.hpp"
#include "backflow/eigensolver.hpp"
#include "backflow/kernel.hpp"
#include "backflow/scan.hpp"
#include "backflow/simd.hpp"
#include "backflow/special_functions.hpp"
#include "backflow/trial_fit.hpp"

#include "support/jacobi.hpp"
#include "support/oracle_tables.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace backflow;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& note) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += note + (ok ? "" : " (FAILED)");
    }
};

std::string f6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

constexpr std::array<double, 7> kTableEps{0.10, 0.50, 0.80, 1.00, 1.60, 2.00, 2.50};
constexpr std::array<double, 7> kTableFlux{0.03686, 0.03088, 0.02722, 0.02498, 0.01947, 0.01660, 0.01372};

std::map<double, EigenSolution> g_solutions;

const EigenSolution& converged(double eps) {
    auto it = g_solutions.find(eps);
    if (it == g_solutions.end()) it = g_solutions.emplace(eps, solve_converged(EpsilonParams(eps))).first;
    return it->second;
}

Verdict reference_table() {
    Verdict v;
    for (std::size_t i = 0; i < kTableEps.size(); ++i) {
        const double lam = converged(kTableEps[i]).lambda;
        v.require(std::abs(std::abs(lam) - kTableFlux[i]) <= 5e-4,
                  "eps " + g(kTableEps[i]) + ": |lambda| " + f6(std::abs(lam)) + " vs " + f6(kTableFlux[i]));
    }
    return v;
}

Verdict nonrelativistic() {
    Verdict v;
    const EigenSolution sol = solve_nonrel();
    v.require(std::abs(std::abs(sol.lambda) - 0.0384517) <= 5e-4, "|lambda| " + f6(std::abs(sol.lambda)) +
                                                                       " vs 0.038452 (h_final " +
                                                                       std::to_string(sol.h_final) + ")");
    return v;
}

Verdict model_consistency() {
    Verdict v;
    for (double e : kTableEps) {
        const double model = closed_form_flux(EpsilonParams(e));
        const double rel = std::abs((std::abs(converged(e).lambda) - model) / model);
        v.require(rel <= 0.02, "eps " + g(e) + ": rel_err " + g(rel));
    }
    return v;
}

Verdict flux_identity() {
    Verdict v;
    for (double e : {0.5, 1.0, 2.0}) {
        const EigenSolution& sol = converged(e);
        const CurrentTrace t = current_trace(envelope_from_eigvec(sol), sol.eps, default_n_tau(sol.eps));
        v.require(std::abs(t.delta - sol.lambda_grid) <= 1e-3,
                  "eps " + g(e) + ": |Delta - lambda_grid| " + g(std::abs(t.delta - sol.lambda_grid)) +
                      ", |Delta - lambda| " + g(std::abs(t.delta - sol.lambda)));
    }
    return v;
}

Verdict bessel_warm_start() {
    Verdict v;
    const EpsilonParams eps(0.9);
    const KernelMatrix m = assemble(eps, FitGrid{}.build());
    const double delta = backflow_of_trial(TrialParams{Family::Bessel, kBesselOptimumEps09, false}, m);
    const double lam = converged(0.9).lambda;
    const double lam_grid = smallest_eig(m, 1e-10, 1000000).lambda;
    v.require(delta / lam >= 0.97, "Delta/lambda(0.9) " + f6(delta / lam));
    v.detail += "; same-grid ratio " + f6(delta / lam_grid);
    return v;
}

Verdict fit_ordering() {
    Verdict v;
    FitScanConfig fc;
    fc.restarts = 500;
    fc.seed = 42;
    const std::vector<double> eps{0.4, 2.0};
    const auto rows = fit_scan(eps, SolverConfig{}, fc);
    for (const ScanRow& row : rows) {
        if (!row.error.empty() || !row.fits) {
            v.require(false, "eps " + g(row.epsilon) + ": " + row.error);
            continue;
        }
        const FitDeltas& d = *row.fits;
        auto order = [&](const char* fam, double mx, double mt, double m6) {
            const std::string tag = "eps " + g(row.epsilon) + " " + fam + " ";
            v.require(std::abs(mx) >= std::abs(mt), tag + "|max| " + f6(std::abs(mx)) + " >= |match| " + f6(std::abs(mt)));
            v.require(std::abs(mt) >= std::abs(m6) - 1e-9,
                      tag + "|match| " + f6(std::abs(mt)) + " >= |match_a6| " + f6(std::abs(m6)));
            if (row.epsilon == 2.0) {
                v.require(std::abs(mx - mt) <= 1e-3, tag + "|max - match| " + g(std::abs(mx - mt)));
            }
        };
        order("airy", d.airy_max, d.airy_match, d.airy_match_a6);
        order("bessel", d.bessel_max, d.bessel_match, d.bessel_match_a6);
    }
    return v;
}

Verdict variational_bound() {
    Verdict v;
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> n01;
    for (double e : {0.5, 1.0, 2.0}) {
        const EigenSolution& sol = converged(e);
        const KernelMatrix m = assemble(sol.eps, sol.grid);
        std::vector<double> eta(m.size());
        int violations = 0;
        double closest = INFINITY;
        for (int k = 0; k < 1000; ++k) {
            for (double& x : eta) x = n01(rng);
            const double q = rayleigh_quotient(eta, m);
            closest = std::min(closest, q - sol.lambda_grid);
            violations += q < sol.lambda_grid;
        }
        v.require(violations == 0, "eps " + g(e) + ": " + std::to_string(violations) + " violations, min gap " + g(closest));
    }
    return v;
}

Verdict oracle_equivalence() {
    Verdict v;
    struct Case {
        double eps, q0;
        int n0;
    };
    for (const Case c : {Case{0.5, 6.0, 200}, Case{1.0, 6.0, 400}, Case{2.0, 8.0, 300}, Case{0.0, 6.0, 250}}) {
        const KernelMatrix m = assemble(EpsilonParams(c.eps), build_grid(c.q0, c.n0, 1));
        const double oracle = testing::jacobi_eigenvalues(m.entries, m.size()).front();
        for (simd::Isa isa : simd::available()) {
            simd::force(isa);
            const double lam = smallest_eig(m, 1e-9, 1000000).lambda;
            v.require(std::abs(lam - oracle) <= 1e-8, "eps " + g(c.eps) + " n " + std::to_string(m.size()) + " " +
                                                          std::string(simd::name(isa)) + ": diff " +
                                                          g(std::abs(lam - oracle)));
        }
        simd::reset();
    }
    return v;
}

Verdict special_functions() {
    Verdict v;
    double worst_j0 = 0.0, worst_ai = 0.0;
    for (const auto& [x, ref] : testing::kBesselJ0Table) worst_j0 = std::max(worst_j0, std::abs(bessel_j0(x) - ref));
    for (const auto& [x, ref] : testing::kAiryAiTable) worst_ai = std::max(worst_ai, std::abs(airy_ai(x) - ref));
    v.require(worst_j0 <= 1e-10, "J0 max error " + g(worst_j0));
    v.require(worst_ai <= 1e-9, "Ai max error " + g(worst_ai));

    double ai_ode = 0.0;
    for (double x = -10.0; x <= 5.0; x += 0.05) {
        const double h = 1e-3;
        const double d2 = (airy_ai(x + h) - 2.0 * airy_ai(x) + airy_ai(x - h)) / (h * h);
        ai_ode = std::max(ai_ode, std::abs(d2 - x * airy_ai(x)));
    }
    v.require(ai_ode <= 1e-4, "Ai ODE residual " + g(ai_ode));

    double j0_ode = 0.0;
    for (double x = 0.5; x <= 50.0; x += 0.25) {
        const double h = 1e-2;
        const double p1 = bessel_j0(x + h), m1 = bessel_j0(x - h), p2 = bessel_j0(x + 2 * h), m2 = bessel_j0(x - 2 * h);
        const double f0 = bessel_j0(x);
        const double d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
        const double d2 = (-m2 + 16.0 * m1 - 30.0 * f0 + 16.0 * p1 - p2) / (12.0 * h * h);
        j0_ode = std::max(j0_ode, std::abs(x * d2 + d1 + x * f0));
    }
    v.require(j0_ode <= 1e-6, "J0 ODE residual " + g(j0_ode));
    return v;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

Verdict determinism() {
    Verdict v;
    const fs::path dir = fs::current_path() / "acceptance_artifacts";
    fs::create_directories(dir);
    auto twice = [&](const std::string& label, std::vector<std::string> args, const std::string& ext) {
        std::string bytes[2];
        std::string stdout_text[2];
        int codes[2];
        for (int k = 0; k < 2; ++k) {
            const fs::path out = dir / (label + "_" + std::to_string(k) + ext);
            auto a = args;
            a.insert(a.begin(), "backflow");
            a.push_back("--out");
            a.push_back(out.string());
            std::ostringstream so, se;
            codes[k] = cli::run(a, so, se);
            bytes[k] = slurp(out);
            stdout_text[k] = so.str();
        }
        v.require(codes[0] == 0 && codes[1] == 0 && !bytes[0].empty() && bytes[0] == bytes[1] &&
                      stdout_text[0] == stdout_text[1],
                  label + " byte-identical (" + std::to_string(bytes[0].size()) + " bytes)");
    };
    twice("fit_max", {"fit", "--family", "bessel", "--mode", "maximize", "--epsilon", "0.9", "--restarts", "20",
                      "--seed", "42", "--verbose"},
          ".json");
    twice("fit_match", {"fit", "--family", "airy", "--mode", "match", "--epsilon", "1.2", "--restarts", "10",
                        "--seed", "5", "--fix-a6"},
          ".json");
    twice("scan", {"scan", "--epsilons", "0.7,1.9", "--with-fits", "--families", "bessel", "--restarts", "3"}, ".csv");
    return v;
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        Verdict (*run)();
    };
    const Criterion criteria[] = {
        {1, "reference eigenvalue table", reference_table},
        {2, "non-relativistic constant", nonrelativistic},
        {3, "closed-form model consistency", model_consistency},
        {4, "flux identity", flux_identity},
        {5, "Bessel warm-start regression", bessel_warm_start},
        {6, "fit-mode ordering", fit_ordering},
        {7, "variational bound", variational_bound},
        {8, "dense oracle equivalence", oracle_equivalence},
        {9, "special-function oracles", special_functions},
        {10, "determinism", determinism},
    };

    std::cout << "simd: " << simd::name(simd::active().isa) << "\n";
    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failures += !v.pass;
        std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << c.id << " " << c.name << " [" << g(secs)
                  << " s]: " << v.detail << std::endl;
    }
    std::cout << (10 - failures) << "/10 criteria passed" << std::endl;
    return failures == 0 ? 0 : 1;
}
