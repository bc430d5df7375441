#include "cli.hpp"
#include "run_config.hpp"

#include "backflow/current.hpp"
#include "backflow/eigensolver.hpp"
#include "backflow/kernel.hpp"
#include "backflow/scan.hpp"
#include "backflow/serialize.hpp"
#include "backflow/trial_fit.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace backflow::cli {

namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Keeps flag values apart from the merged config so that only options the
// user actually typed override values read from --config.
class Binder {
public:
    using Apply = std::function<void(RunConfig&, const RunConfig&)>;

    template <class T>
    CLI::Option* option(CLI::App* app, const std::string& name, T RunConfig::*member, const std::string& desc) {
        CLI::Option* opt = app->add_option(name, flags_.*member, desc);
        bindings_.emplace_back(opt, [member](RunConfig& dst, const RunConfig& src) { dst.*member = src.*member; });
        return opt;
    }

    CLI::Option* flag(CLI::App* app, const std::string& name, bool RunConfig::*member, bool value,
                      const std::string& desc) {
        CLI::Option* opt = app->add_flag(name, desc);
        bindings_.emplace_back(opt, [member, value](RunConfig& dst, const RunConfig&) { dst.*member = value; });
        return opt;
    }

    void apply(RunConfig& cfg) const {
        for (const auto& [opt, fn] : bindings_) {
            if (opt->count() > 0) fn(cfg, flags_);
        }
    }

private:
    RunConfig flags_;
    std::vector<std::pair<CLI::Option*, Apply>> bindings_;
};

void add_solver_options(Binder& b, CLI::App* app) {
    b.option(app, "--q0", &RunConfig::q0, "base momentum range multiplier");
    b.option(app, "--n0", &RunConfig::n0, "base node count per refinement level");
    b.option(app, "--eig-tol", &RunConfig::eig_tol, "power-iteration residual tolerance");
    b.option(app, "--refine-tol", &RunConfig::refine_tol, "refinement stopping tolerance on lambda");
    b.option(app, "--h-max", &RunConfig::h_max, "maximum refinement level");
    b.option(app, "--max-iter", &RunConfig::max_iter, "power-iteration cap per level");
    b.flag(app, "--no-extrapolate", &RunConfig::extrapolate, false, "report the raw finest-grid eigenvalue");
}

void add_fit_grid_options(Binder& b, CLI::App* app) {
    b.option(app, "--fit-length", &RunConfig::fit_length, "momentum range of the fitting grid");
    b.option(app, "--fit-nodes", &RunConfig::fit_nodes, "node count of the fitting grid");
}

SolverConfig solver_config(const RunConfig& c) {
    SolverConfig s;
    s.q0 = c.q0;
    s.n0 = c.n0;
    s.eig_tol = c.eig_tol;
    s.refine_tol = c.refine_tol;
    s.h_max = c.h_max;
    s.max_iter = c.max_iter;
    s.extrapolate = c.extrapolate;
    return s;
}

FitGrid fit_grid(const RunConfig& c) { return FitGrid{c.fit_length, c.fit_nodes}; }

void require(bool ok, const std::string& message) {
    if (!ok) throw UsageError(message);
}

Family parse_family(const std::string& name) {
    try {
        return family_from_string(name);
    } catch (const std::exception&) {
        throw UsageError("unknown family '" + name + "' (expected airy or bessel)");
    }
}

void validate_solver(const RunConfig& c) {
    require(std::isfinite(c.q0) && c.q0 > 0.0, "--q0 must be positive");
    require(c.n0 >= 2, "--n0 must be at least 2");
    require(c.eig_tol > 0.0, "--eig-tol must be positive");
    require(c.refine_tol > 0.0, "--refine-tol must be positive");
    require(c.h_max >= 1, "--h-max must be at least 1");
    require(c.max_iter >= 1, "--max-iter must be at least 1");
}

void validate_fit(const RunConfig& c) {
    require(c.restarts >= 1, "--restarts must be at least 1");
    require(c.max_evals >= 1, "--max-evals must be at least 1");
    require(std::isfinite(c.fit_length) && c.fit_length > 0.0, "--fit-length must be positive");
    require(c.fit_nodes >= 3, "--fit-nodes must be at least 3");
}

void validate_epsilon(double e) {
    require(std::isfinite(e) && e > 0.0, "--epsilon must be a positive finite number");
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw UsageError("cannot open output file '" + path + "'");
    return f;
}

void write_json(const json& j, const std::string& path) {
    std::ofstream f = open_out(path);
    f << j.dump(2) << '\n';
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

json failure_json(const SolverError& e, double epsilon) {
    json levels = json::array();
    for (const RefinementLevel& l : e.levels()) {
        levels.push_back({{"h", l.h}, {"lambda", l.lambda}, {"iterations", l.iterations}});
    }
    return {{"error", e.what()},
            {"epsilon", epsilon},
            {"best_lambda", std::isfinite(e.best_lambda()) ? json(e.best_lambda()) : json(nullptr)},
            {"residual", std::isfinite(e.residual()) ? json(e.residual()) : json(nullptr)},
            {"levels", levels}};
}

void print_solution(const EigenSolution& sol, std::ostream& out) {
    out << "epsilon " << fmt(sol.eps.value()) << "\n"
        << "lambda " << fmt(sol.lambda) << "\n"
        << "lambda_grid " << fmt(sol.lambda_grid) << "\n"
        << "levels " << sol.levels.size() << " h_final " << sol.h_final << " nodes " << sol.grid.size()
        << " upper " << fmt(sol.grid.upper()) << "\n"
        << "iterations " << sol.iterations << " residual " << fmt(sol.residual) << "\n";
}

int cmd_eigen(const RunConfig& c, bool nonrel, std::ostream& out, std::ostream& err) {
    validate_solver(c);
    if (!nonrel) validate_epsilon(c.epsilon);
    const std::string path = c.out.empty() ? "eigen.json" : c.out;
    const double e = nonrel ? 0.0 : c.epsilon;
    try {
        const EigenSolution sol = nonrel ? solve_nonrel(solver_config(c)) : solve_converged(EpsilonParams(e), solver_config(c));
        write_json(to_json(sol), path);
        if (!c.dump_matrix.empty()) write_matrix_csv(assemble(sol.eps, sol.grid), c.dump_matrix);
        print_solution(sol, out);
        return kExitOk;
    } catch (const SolverError& ex) {
        write_json(failure_json(ex, e), path);
        err << "solver failed: " << ex.what() << "\n";
        return kExitFailure;
    }
}

int cmd_scan(const RunConfig& c, std::ostream& out, std::ostream& err) {
    validate_solver(c);
    require(!c.epsilons.empty(), "scan needs at least one epsilon");
    for (double e : c.epsilons) validate_epsilon(e);

    std::vector<ScanRow> rows;
    if (c.with_fits) {
        validate_fit(c);
        require(!c.families.empty(), "--families must name at least one family");
        FitScanConfig fc;
        fc.families.clear();
        for (const std::string& f : c.families) fc.families.push_back(parse_family(f));
        fc.restarts = c.restarts;
        fc.seed = c.seed;
        fc.grid = fit_grid(c);
        fc.max_evals = c.max_evals;
        rows = fit_scan(c.epsilons, solver_config(c), fc);
    } else {
        rows = eigen_scan(c.epsilons, solver_config(c));
    }

    const std::string path = c.out.empty() ? "scan.csv" : c.out;
    {
        std::ofstream f = open_out(path);
        write_scan_csv(rows, c.with_fits, f);
    }
    bool failed = false;
    for (const ScanRow& r : rows) {
        out << "epsilon " << fmt(r.epsilon) << " lambda " << fmt(r.lambda) << " model " << fmt(r.model);
        if (!r.error.empty()) {
            out << " error " << r.error;
            err << "epsilon " << fmt(r.epsilon) << ": " << r.error << "\n";
            failed = true;
        }
        out << "\n";
    }
    return failed ? kExitFailure : kExitOk;
}

int cmd_current(const RunConfig& c, std::ostream& out, std::ostream& err) {
    validate_epsilon(c.epsilon);
    require(c.n_tau == 0 || c.n_tau >= 2, "--n-tau must be at least 2");
    const EpsilonParams eps(c.epsilon);
    const int n_tau = c.n_tau == 0 ? default_n_tau(eps) : c.n_tau;
    const std::string path = c.out.empty() ? "current.csv" : c.out;

    CurrentTrace trace;
    double reference = 0.0;
    if (c.trial.empty()) {
        validate_solver(c);
        try {
            const EigenSolution sol = solve_converged(eps, solver_config(c));
            trace = current_trace(envelope_from_eigvec(sol), eps, n_tau);
            reference = sol.lambda_grid;
        } catch (const SolverError& ex) {
            write_json(failure_json(ex, c.epsilon), path + ".error.json");
            err << "solver failed: " << ex.what() << "\n";
            return kExitFailure;
        }
    } else {
        validate_fit(c);
        require(c.params.size() == 6, "--params needs exactly six values a1..a6");
        TrialParams p;
        p.family = parse_family(c.trial);
        std::copy(c.params.begin(), c.params.end(), p.a.begin());
        try {
            p.validate();
        } catch (const std::exception& ex) {
            throw UsageError(ex.what());
        }
        const QuadGrid grid = fit_grid(c).build();
        const std::vector<double> samples = sample_trial(p, grid, eps);
        trace = current_trace(envelope_from_real(eps, grid, samples), eps, n_tau);
        reference = backflow_of_trial(p, assemble(eps, grid));
    }

    write_current_csv(trace, path);
    out << "epsilon " << fmt(c.epsilon) << "\n"
        << "delta " << fmt(trace.delta) << "\n"
        << "rayleigh " << fmt(reference) << "\n"
        << "sign_changes " << sign_changes(trace) << "\n"
        << "turning_points " << turning_points(trace) << "\n";
    return kExitOk;
}

int cmd_fit(const RunConfig& c, std::ostream& out, std::ostream& err) {
    validate_epsilon(c.epsilon);
    validate_fit(c);
    const Family family = parse_family(c.family);
    require(c.mode == "maximize" || c.mode == "match", "--mode must be maximize or match");
    const EpsilonParams eps(c.epsilon);

    FitOptions opts;
    opts.restarts = c.restarts;
    opts.seed = c.seed;
    opts.a6_fixed = c.fix_a6;
    opts.max_evals = c.max_evals;
    opts.weighted_residual = !c.plain_residual;
    if (c.warm_start && family == Family::Bessel) {
        opts.warm_starts = {kBesselOptimumEps09, kBesselCurrentEps10};
    }

    const std::string path = c.out.empty() ? "fit.json" : c.out;
    try {
        const QuadGrid grid = fit_grid(c).build();
        const KernelMatrix m = assemble(eps, grid);
        FitResult r;
        if (c.mode == "maximize") {
            r = maximize_backflow(family, m, opts);
        } else {
            const EigenSolution sol = solve_on_grid(eps, grid, c.eig_tol, c.max_iter);
            r = match_eigenvector(family, sol, m, opts);
        }
        json j = to_json(r, c.verbose);
        j["epsilon"] = c.epsilon;
        j["mode"] = c.mode;
        write_json(j, path);

        out << "family " << to_string(family) << " mode " << c.mode << "\n"
            << "delta " << fmt(r.delta) << "\n"
            << "lambda " << fmt(r.lambda) << "\n"
            << "ratio " << fmt(r.delta / r.lambda) << "\n"
            << "params";
        for (double a : r.params.a) out << ' ' << fmt(a);
        out << "\n";
        if (r.residual) out << "residual " << fmt(*r.residual) << "\n";
        return kExitOk;
    } catch (const SolverError& ex) {
        write_json(failure_json(ex, c.epsilon), path);
        err << "solver failed: " << ex.what() << "\n";
        return kExitFailure;
    } catch (const FitError& ex) {
        write_json({{"error", ex.what()}, {"epsilon", c.epsilon}}, path);
        err << "fit failed: " << ex.what() << "\n";
        return kExitFailure;
    }
}

int cmd_formula(const RunConfig& c, std::ostream& out) {
    require(std::isfinite(c.epsilon) && c.epsilon >= 0.0, "--epsilon must be a non-negative finite number");
    out << fmt(closed_form_flux(EpsilonParams(c.epsilon))) << "\n";
    return kExitOk;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot read config file '" + path + "'");
    try {
        return run_config_from_json(json::parse(f));
    } catch (const std::exception& ex) {
        throw UsageError("invalid config file '" + path + "': " + ex.what());
    }
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Relativistic quantum backflow eigenvalues, currents and trial fits", "backflow"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON run configuration; explicit flags take precedence");

    Binder b;

    CLI::App* eigen = app.add_subcommand("eigen", "solve the backflow eigenproblem at one epsilon");
    b.option(eigen, "--epsilon", &RunConfig::epsilon, "relativistic parameter (> 0)");
    add_solver_options(b, eigen);
    b.option(eigen, "--out", &RunConfig::out, "solution JSON path (default eigen.json)");
    b.option(eigen, "--dump-matrix", &RunConfig::dump_matrix, "also write the final kernel matrix as CSV");

    CLI::App* nonrel = app.add_subcommand("eigen-nonrel", "solve the non-relativistic limit");
    add_solver_options(b, nonrel);
    b.option(nonrel, "--out", &RunConfig::out, "solution JSON path (default eigen.json)");
    b.option(nonrel, "--dump-matrix", &RunConfig::dump_matrix, "also write the final kernel matrix as CSV");

    CLI::App* scan = app.add_subcommand("scan", "eigenvalue (and optionally fit) scan over epsilon");
    b.option(scan, "--epsilons", &RunConfig::epsilons, "comma-separated epsilon list (default 0.1..2.5)")
        ->delimiter(',');
    add_solver_options(b, scan);
    b.flag(scan, "--with-fits", &RunConfig::with_fits, true, "add trial-function fit columns");
    b.option(scan, "--families", &RunConfig::families, "comma-separated families for --with-fits")->delimiter(',');
    b.option(scan, "--restarts", &RunConfig::restarts, "random restarts per fit");
    b.option(scan, "--seed", &RunConfig::seed, "fit RNG seed");
    b.option(scan, "--max-evals", &RunConfig::max_evals, "objective evaluations per restart");
    add_fit_grid_options(b, scan);
    b.option(scan, "--out", &RunConfig::out, "CSV path (default scan.csv)");

    CLI::App* current = app.add_subcommand("current", "probability current trace J(tau)");
    b.option(current, "--epsilon", &RunConfig::epsilon, "relativistic parameter (> 0)");
    b.option(current, "--n-tau", &RunConfig::n_tau, "number of tau samples on [0, 1]");
    b.option(current, "--trial", &RunConfig::trial, "use a trial function (airy or bessel) instead of the eigenvector");
    b.option(current, "--params", &RunConfig::params, "trial parameters a1..a6, comma-separated")->delimiter(',');
    add_solver_options(b, current);
    add_fit_grid_options(b, current);
    b.option(current, "--out", &RunConfig::out, "CSV path (default current.csv)");

    CLI::App* fit = app.add_subcommand("fit", "fit a trial wavefunction");
    b.option(fit, "--family", &RunConfig::family, "airy or bessel");
    b.option(fit, "--mode", &RunConfig::mode, "maximize or match");
    b.option(fit, "--epsilon", &RunConfig::epsilon, "relativistic parameter (> 0)");
    b.option(fit, "--restarts", &RunConfig::restarts, "random restarts");
    b.option(fit, "--seed", &RunConfig::seed, "RNG seed");
    b.flag(fit, "--fix-a6", &RunConfig::fix_a6, true, "hold a6 at 2/3");
    b.flag(fit, "--warm-start", &RunConfig::warm_start, true, "try the reference Bessel vectors before random draws");
    b.flag(fit, "--plain-residual", &RunConfig::plain_residual, true, "unweighted per-node residual in match mode");
    b.option(fit, "--max-evals", &RunConfig::max_evals, "objective evaluations per restart");
    b.option(fit, "--eig-tol", &RunConfig::eig_tol, "power-iteration tolerance for the match target");
    b.option(fit, "--max-iter", &RunConfig::max_iter, "power-iteration cap for the match target");
    add_fit_grid_options(b, fit);
    b.flag(fit, "--verbose", &RunConfig::verbose, true, "include the per-restart objective trace");
    b.option(fit, "--out", &RunConfig::out, "result JSON path (default fit.json)");

    CLI::App* formula = app.add_subcommand("formula", "closed-form flux model");
    b.option(formula, "--epsilon", &RunConfig::epsilon, "relativistic parameter (>= 0)");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        b.apply(cfg);

        if (eigen->parsed()) return cmd_eigen(cfg, false, out, err);
        if (nonrel->parsed()) return cmd_eigen(cfg, true, out, err);
        if (scan->parsed()) return cmd_scan(cfg, out, err);
        if (current->parsed()) return cmd_current(cfg, out, err);
        if (fit->parsed()) return cmd_fit(cfg, out, err);
        return cmd_formula(cfg, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

} // namespace backflow::cli
