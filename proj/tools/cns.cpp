// cns — pseudo-spectral Navier-Stokes simulator and harmonic-analysis
// verification toolkit for a periodic box.
//
// Subcommands: simulate, analyze, pipeline, verify, export.
// Exit codes: 0 ok, 2 validation failure, 3 solver halt.

#include <CLI11.hpp>

#include <iostream>

#include "cns/experiment.hpp"
#include "cns/spacetime_field.hpp"

namespace {

cns::Vec3 parse_vec3(const std::string& s) {
    cns::Vec3 v;
    if (std::sscanf(s.c_str(), "%lf,%lf,%lf", &v[0], &v[1], &v[2]) != 3)
        throw cns::ValidationError("expected 'x,y,z', got '" + s + "'");
    return v;
}

int run_verify_suite(const std::string& suite);

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo-spectral Navier-Stokes simulator and verification toolkit"};
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run the solver from a config file");
    std::string config_path, out_dir = "run_out";
    std::vector<std::string> overrides;
    bool with_global_ledger = false, with_local_ledger = false;
    simulate->add_option("--config", config_path, "flat key=value config file")->required();
    simulate->add_option("--out", out_dir, "artifact directory");
    simulate->add_option("--set", overrides, "override config values, key=value (flags win over config)");
    simulate->add_flag("--ledger-global", with_global_ledger, "also export the global enstrophy ledger");
    simulate->add_flag("--ledger-local", with_local_ledger, "also export the local enstrophy ledger");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "recompute reports from a stored trajectory");
    std::string traj_dir;
    std::string ledger_kind = "global";
    std::string analyze_out = "ledger.csv";
    analyze->add_option("--traj", traj_dir, "trajectory directory")->required();
    analyze->add_option("--ledger", ledger_kind, "global | local | residual");
    analyze->add_option("--out", analyze_out, "output CSV path");

    // pipeline
    auto* pipeline = app.add_subcommand("pipeline", "staged main-estimate walkthrough");
    std::string pipe_traj, pipe_out = "pipeline.json";
    double seed_time = 0.0, seed_N = 0.0, pipe_A = 2.0, pipe_c0 = 2.0;
    std::string seed_x = "0,0,0";
    pipeline->add_option("--traj", pipe_traj, "trajectory directory")->required();
    pipeline->add_option("--seed-time", seed_time, "seed event time")->required();
    pipeline->add_option("--seed-x", seed_x, "seed position 'x,y,z'")->required();
    pipeline->add_option("--seed-N", seed_N, "seed frequency")->required();
    pipeline->add_option("--A", pipe_A, "surrogate amplitude A (>= 2)");
    pipeline->add_option("--c0", pipe_c0, "surrogate ladder exponent c0 (>= 2)");
    pipeline->add_option("--out", pipe_out, "report JSON path");

    // verify
    auto* verify = app.add_subcommand("verify", "run property suites on synthetic data");
    std::string suite = "all";
    verify->add_option("--suite", suite, "carleman | lp | solver | concentration | all");

    // export
    auto* export_cmd = app.add_subcommand("export", "export diagnostics from a trajectory");
    std::string export_traj, export_what = "diagnostics", export_out = "out.csv";
    export_cmd->add_option("--traj", export_traj, "trajectory directory")->required();
    export_cmd->add_option("--what", export_what, "diagnostics");
    export_cmd->add_option("--out", export_out, "output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) {
            cns::experiment::ExperimentSpec spec;
            spec.config = cns::load_config(config_path);
            std::map<std::string, std::string> kv;
            for (const auto& ov : overrides) {
                const auto eq = ov.find('=');
                if (eq == std::string::npos) throw cns::ValidationError("--set expects key=value");
                kv[ov.substr(0, eq)] = ov.substr(eq + 1);
            }
            cns::apply_overrides(spec.config, kv);
            spec.out_dir = out_dir;
            spec.global_ledger = with_global_ledger;
            spec.local_ledger = with_local_ledger;
            if (with_local_ledger) {
                const double L = spec.config.solver.grid.L;
                spec.cutoff.center = {L / 2.0, L / 2.0, L / 2.0};
                spec.cutoff.R_minus0 = L / 10.0;
                spec.cutoff.R_plus0 = 0.45 * L;
                spec.cutoff.A6 = L / 20.0;
                spec.cutoff.C0 = 2.0;
            }
            const auto result = cns::experiment::run_experiment(spec);
            std::cout << "artifacts written to " << out_dir << " (" << result.manifest.files.size() << " files)\n";
            if (result.halted) {
                std::cerr << "solver halted: " << result.trajectory.halt->reason << "\n";
                return 3;
            }
        } else if (*analyze) {
            const auto traj = cns::experiment::load_trajectory(traj_dir);
            if (ledger_kind == "residual") {
                const auto rep = cns::solver::residual_check(traj);
                cns::report::CsvTable table;
                table.columns = {"time", "residual"};
                for (size_t i = 0; i < rep.times.size(); ++i) table.rows.push_back({rep.times[i], rep.residuals[i]});
                cns::report::export_csv(table, analyze_out);
            } else {
                const auto split = cns::solver::duhamel_split(traj, traj.start_time());
                cns::carleman::EnstrophyLedger ledger;
                if (ledger_kind == "global") {
                    ledger = cns::carleman::global_enstrophy_ledger(split, traj, traj.start_time(), traj.end_time());
                } else if (ledger_kind == "local") {
                    cns::carleman::MovingCutoff cutoff;
                    const double L = traj.config.grid.L;
                    cutoff.center = {L / 2.0, L / 2.0, L / 2.0};
                    cutoff.R_minus0 = L / 10.0;
                    cutoff.R_plus0 = 0.45 * L;
                    cutoff.A6 = L / 20.0;
                    cutoff.C0 = 2.0;
                    ledger = cns::carleman::local_enstrophy_ledger(split, traj, cutoff, traj.start_time(),
                                                                   traj.end_time());
                } else {
                    throw cns::ValidationError("unknown ledger kind '" + ledger_kind + "'");
                }
                std::ofstream out(analyze_out, std::ios::trunc);
                out << cns::carleman::ledger_csv(ledger);
            }
            std::cout << "wrote " << analyze_out << "\n";
        } else if (*pipeline) {
            const auto traj = cns::experiment::load_trajectory(pipe_traj);
            cns::concentration::SurrogateConstants consts(pipe_A, pipe_c0);
            cns::concentration::ConcentrationEvent seed;
            seed.t = seed_time;
            seed.x = parse_vec3(seed_x);
            seed.N = seed_N;
            seed.value = cns::concentration::concentration_value(traj, seed_time, seed.x, seed_N);
            const auto report = cns::experiment::pipeline_main_estimate(traj, seed, consts);
            cns::report::export_json(report.to_json(), pipe_out);
            std::cout << "wrote " << pipe_out << "\n";
        } else if (*verify) {
            return run_verify_suite(suite);
        } else if (*export_cmd) {
            const auto traj = cns::experiment::load_trajectory(export_traj);
            if (export_what != "diagnostics")
                throw cns::ValidationError("unknown export target '" + export_what + "'");
            cns::report::CsvTable table;
            table.columns = {"time", "energy", "enstrophy", "l3_norm", "linf_norm", "total_speed_accum"};
            for (int i = 0; i < traj.size(); ++i) {
                const auto& d = traj.diagnostics[i];
                table.rows.push_back({traj.times[i], d.energy, d.enstrophy, d.l3_norm, d.linf_norm,
                                      d.total_speed_accum});
            }
            cns::report::export_csv(table, export_out);
            std::cout << "wrote " << export_out << "\n";
        }
    } catch (const cns::SolverHaltError& e) {
        std::cerr << "solver halt: " << e.what() << "\n";
        return 3;
    } catch (const cns::ValidationError& e) {
        std::cerr << "validation failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

namespace {

struct SuiteRunner {
    int failures = 0;
    void check(const std::string& name, bool ok) {
        std::cout << (ok ? "PASS" : "FAIL") << "  " << name << "\n";
        if (!ok) ++failures;
    }
};

int run_verify_suite(const std::string& suite) {
    using namespace cns;
    SuiteRunner r;
    const Grid3 grid(16, 2.0 * M_PI);

    if (suite == "lp" || suite == "all") {
        const lp::LPProjector proj(grid);
        const SpectralField f = solver::random_scalar_band(grid, 11, 1, 5, 1.0);
        const double N = 8.0 / grid.L;
        SpectralField band = proj.project_band(f, N);
        SpectralField band_tilde = proj.project_band(proj.project_tilde(f, N), N);
        band_tilde -= band;
        r.check("lp: P_N = P_N P~_N", spectral::max_abs_coeff(band_tilde) <= 1e-12 * spectral::max_abs_coeff(f));
        SpectralField low = proj.project_leq(f, N / 4.0);
        SpectralField nested = proj.project_leq(low, N);
        nested -= low;
        r.check("lp: nested P_leq", spectral::max_abs_coeff(nested) <= 1e-12 * spectral::max_abs_coeff(f));
    }
    if (suite == "solver" || suite == "all") {
        solver::SolverConfig cfg;
        cfg.grid = grid;
        cfg.dt = 0.005;  // the 1e-8 energy-law budget needs dt <= 5e-3 here
        cfg.t_end = 0.1;
        const auto traj = solver::run(cfg, solver::taylor_green(grid));
        r.check("solver: energy inequality", solver::energy_inequality_violation(traj) <= 1e-8);
        r.check("solver: divergence-free", spectral::relative_divergence(traj.snapshots.back()) <= 1e-10);
    }
    if (suite == "carleman" || suite == "all") {
        carleman::WeightSecondParams p;
        p.alpha = 3.0;
        p.T = 1e-4;
        p.T0 = 5e-5;
        p.t1 = 1e-5;
        p.r = 1.0;
        const auto w = carleman::weight_second(p);
        const auto check = carleman::weight_consistency_check(w, 50, 5);
        r.check("carleman: weight_second F/LF closed forms", check.max_rel_err_F <= 1e-6 &&
                                                                 check.max_rel_err_LF <= 1e-6 && check.f_sign_ok);
    }
    if (suite == "concentration" || suite == "all") {
        solver::SolverConfig cfg;
        cfg.grid = grid;
        cfg.dt = 0.01;
        cfg.t_end = 0.2;
        const auto traj = solver::run(cfg, solver::taylor_green(grid));
        const auto epoch = concentration::find_epoch(traj, 0.0, 0.2, 4);
        const double whole = concentration::epoch_certificate(traj, 0.0, 0.2, 0.0, 0.2);
        r.check("concentration: epoch optimality vs parent", epoch.worst_certificate <= whole + 1e-12);
    }
    if (r.failures > 0) {
        std::cout << r.failures << " check(s) failed\n";
        return 2;
    }
    std::cout << "all checks passed\n";
    return 0;
}

}  // namespace
