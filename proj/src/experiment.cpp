#include "cns/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "cns/snapshot_io.hpp"
#include "cns/spacetime_field.hpp"

namespace cns {
namespace experiment {

namespace fs = std::filesystem;

namespace {
std::string snapshot_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "snapshot_%06d.cns", index);
    return buf;
}
}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    require(!spec.out_dir.empty(), "run_experiment: output directory required");
    fs::create_directories(spec.out_dir);

    ExperimentResult result;
    const SpectralField initial = spec.config.build_initial();
    result.trajectory = solver::run(spec.config.solver, initial);
    result.halted = result.trajectory.halt.has_value();

    if (spec.write_snapshots) {
        for (int i = 0; i < result.trajectory.size(); ++i)
            write_snapshot((fs::path(spec.out_dir) / snapshot_name(i)).string(), result.trajectory.snapshots[i],
                           result.trajectory.times[i]);
    }
    if (spec.diagnostics_csv) {
        report::CsvTable table;
        table.columns = {"time", "energy", "enstrophy", "l3_norm", "linf_norm", "total_speed_accum"};
        for (int i = 0; i < result.trajectory.size(); ++i) {
            const auto& d = result.trajectory.diagnostics[i];
            table.rows.push_back({result.trajectory.times[i], d.energy, d.enstrophy, d.l3_norm, d.linf_norm,
                                  d.total_speed_accum});
        }
        report::export_csv(table, (fs::path(spec.out_dir) / "diagnostics.csv").string());
    }
    if ((spec.global_ledger || spec.local_ledger) && result.trajectory.size() >= 3 && !result.halted) {
        const auto split = solver::duhamel_split(result.trajectory, result.trajectory.start_time());
        if (spec.global_ledger) {
            const auto ledger = carleman::global_enstrophy_ledger(split, result.trajectory,
                                                                  result.trajectory.start_time(),
                                                                  result.trajectory.end_time());
            std::ofstream out((fs::path(spec.out_dir) / "ledger_global.csv").string(), std::ios::trunc);
            out << carleman::ledger_csv(ledger);
        }
        if (spec.local_ledger) {
            const auto ledger = carleman::local_enstrophy_ledger(split, result.trajectory, spec.cutoff,
                                                                 result.trajectory.start_time(),
                                                                 result.trajectory.end_time());
            std::ofstream out((fs::path(spec.out_dir) / "ledger_local.csv").string(), std::ios::trunc);
            out << carleman::ledger_csv(ledger);
        }
    }

    nlohmann::json meta;
    meta["seed"] = spec.config.seed;
    meta["config"] = spec.config.as_flat_map();
    if (result.halted) {
        meta["halt"] = {{"time", result.trajectory.halt->time},
                        {"step_index", result.trajectory.halt->step_index},
                        {"reason", result.trajectory.halt->reason}};
    }
    result.manifest = report::write_manifest(spec.out_dir, meta);
    return result;
}

solver::TrajectoryRecord load_trajectory(const std::string& dir) {
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("snapshot_", 0) == 0 && name.size() > 4 && name.substr(name.size() - 4) == ".cns")
            names.push_back(entry.path().string());
    }
    require(!names.empty(), "load_trajectory: no snapshots in " + dir);
    std::sort(names.begin(), names.end());
    solver::TrajectoryRecord traj;
    for (const auto& path : names) {
        Snapshot snap = read_snapshot(path);
        traj.times.push_back(snap.time);
        traj.snapshots.push_back(std::move(snap.field));
        solver::SnapshotDiagnostics d;
        const auto& f = traj.snapshots.back();
        d.energy = 0.5 * spectral::l2_norm(f) * spectral::l2_norm(f);
        const SpectralField omega = spectral::curl(f);
        d.enstrophy = 0.5 * spectral::l2_norm(omega) * spectral::l2_norm(omega);
        const RealField u = spectral::inverse_transform_unchecked(f);
        d.l3_norm = spectral::lp_norm(u, 3.0);
        d.linf_norm = spectral::lp_norm(u, std::numeric_limits<double>::infinity());
        traj.diagnostics.push_back(d);
    }
    traj.config.grid = traj.snapshots.front().grid;
    if (traj.size() >= 2) traj.config.dt = traj.times[1] - traj.times[0];
    traj.config.t_end = traj.times.back();
    traj.config.start_time = traj.times.front();
    // accumulated diagnostics are reconstructed by trapezoid (approximate)
    double diss = 0.0, speed = 0.0;
    for (int i = 0; i < traj.size(); ++i) {
        if (i > 0) {
            const double dt = traj.times[i] - traj.times[i - 1];
            diss += 0.5 * dt * (spectral::dissipation_norm_sq(traj.snapshots[i]) +
                                spectral::dissipation_norm_sq(traj.snapshots[i - 1]));
            speed += 0.5 * dt * (traj.diagnostics[i].linf_norm + traj.diagnostics[i - 1].linf_norm);
        }
        traj.diagnostics[i].dissipation_accum = diss;
        traj.diagnostics[i].total_speed_accum = speed;
    }
    return traj;
}

nlohmann::json PipelineReport::to_json() const {
    nlohmann::json stages_json = nlohmann::json::array();
    for (const auto& s : stages)
        stages_json.push_back(
            {{"name", s.name}, {"status", s.status}, {"reason", s.reason}, {"inputs", s.inputs}, {"data", s.data}});
    return {{"params", params}, {"stages", stages_json}};
}

PipelineReport PipelineReport::from_json(const nlohmann::json& j) {
    PipelineReport rep;
    rep.params = j.at("params");
    for (const auto& s : j.at("stages"))
        rep.stages.push_back({s.at("name").get<std::string>(), s.at("status").get<std::string>(),
                              s.at("reason").get<std::string>(), s.at("inputs"), s.at("data")});
    return rep;
}

const PipelineStage* PipelineReport::find(const std::string& name) const {
    for (const auto& s : stages)
        if (s.name == name) return &s;
    return nullptr;
}

PipelineReport pipeline_main_estimate(const solver::TrajectoryRecord& traj,
                                      const concentration::ConcentrationEvent& seed,
                                      const concentration::SurrogateConstants& consts,
                                      const PipelineOptions& opts) {
    PipelineReport report;
    const Grid3& g = traj.config.grid;
    const double span = traj.end_time() - traj.start_time();
    const double T1 = opts.T1 > 0.0 ? opts.T1 : span / 2.0;
    report.params = {{"A", consts.A},
                     {"c0", consts.c0},
                     {"T1", T1},
                     {"seed_event", seed.to_json()},
                     {"threshold", 1.0 / consts.A_j(1)}};

    auto skip_all_from = [&](const std::string& name, const std::string& reason) {
        report.stages.push_back({name, "skipped", reason, {}, {}});
    };

    // stage 1: seed admissibility
    const double threshold = 1.0 / consts.A_j(1);
    {
        PipelineStage s;
        s.name = "seed_check";
        s.inputs = seed.to_json();
        if (seed.value >= threshold) {
            s.status = "ok";
            s.data = {{"threshold", threshold}, {"value", seed.value}};
        } else {
            s.status = "skipped";
            s.reason = "seed value below A_1^{-1} threshold";
        }
        report.stages.push_back(s);
        if (s.status == "skipped") {
            for (const char* name : {"back_propagation", "vorticity_lower_bound", "epoch", "second_carleman",
                                     "gaussian_lower_bound", "annulus", "first_carleman", "final_l3_mass"})
                skip_all_from(name, "seed below threshold");
            return report;
        }
    }

    // stage 2: back propagation
    concentration::ConcentrationEvent last = seed;
    {
        PipelineStage s;
        s.name = "back_propagation";
        const auto windows = concentration::ChainWindows::from_constants(consts);
        s.inputs = {{"windows",
                     {{"time_lo", windows.time_lo},
                      {"time_hi", windows.time_hi},
                      {"space", windows.space},
                      {"freq", windows.freq}}}};
        try {
            const auto chain = concentration::back_propagate_chain(traj, seed, consts, windows);
            s.status = "ok";
            s.data = chain.to_json();
            last = chain.events.back();
        } catch (const ValidationError& e) {
            s.status = "skipped";
            s.reason = e.what();
        }
        report.stages.push_back(s);
    }

    // stage 3: vorticity lower bound near the chain tail
    {
        PipelineStage s;
        s.name = "vorticity_lower_bound";
        const double rho = std::min(consts.A_j(1) / last.N, g.L / 4.0);
        s.inputs = {{"event", last.to_json()}, {"rho", rho}};
        try {
            const int i = traj.index_of_time(last.t);
            const lp::LPProjector proj(g);
            const SpectralField omega = spectral::curl(traj.snapshots[i]);
            const SpectralField band = proj.project_tilde(omega, last.N);
            const RealField band_phys = spectral::inverse_transform_unchecked(band);
            const RealField omega_phys = spectral::inverse_transform_unchecked(omega);
            double band_mass = 0.0, full_mass = 0.0;
            std::int64_t idx = 0;
            for (int i0 = 0; i0 < g.n; ++i0)
                for (int i1 = 0; i1 < g.n; ++i1)
                    for (int i2 = 0; i2 < g.n; ++i2, ++idx) {
                        if (g.periodic_distance(g.point(i0, i1, i2), last.x) > rho) continue;
                        const double b = band_phys.magnitude(idx);
                        const double f = omega_phys.magnitude(idx);
                        band_mass += b * b;
                        full_mass += f * f;
                    }
            band_mass *= g.cell_volume();
            full_mass *= g.cell_volume();
            const Vec3 at = spectral::eval_at(band, last.x);
            s.status = "ok";
            s.data = {{"band_mass", band_mass},
                      {"full_mass", full_mass},
                      {"tilde_band_value", at.norm()},
                      {"scale_invariant_floor", threshold * last.N * last.N}};
        } catch (const ValidationError& e) {
            s.status = "skipped";
            s.reason = e.what();
        }
        report.stages.push_back(s);
    }

    // stage 4: epoch of regularity before the tail event
    double epoch_begin = 0.0, epoch_end = 0.0;
    bool have_epoch = false;
    {
        PipelineStage s;
        s.name = "epoch";
        const double a = std::max(traj.start_time(), last.t - T1);
        int in_window = 0;
        for (int i = 0; i < traj.size(); ++i)
            if (traj.times[i] >= a - 1e-12 && traj.times[i] <= last.t + 1e-12) ++in_window;
        if (in_window < 2 || last.t - a <= 0.0) {
            s.status = "skipped";
            s.reason = "chain tail leaves no usable lookback window";
            report.stages.push_back(s);
            goto epoch_done;
        }
        {
        const int subdivisions = std::max(1, std::min(opts.epoch_subdivisions, in_window - 1));
        s.inputs = {{"t_begin", a}, {"t_end", last.t}, {"subdivisions", subdivisions}};
        try {
            const auto epoch = concentration::find_epoch(traj, a, last.t, subdivisions);
            s.status = "ok";
            s.data = epoch.to_json();
            epoch_begin = epoch.begin;
            epoch_end = epoch.end;
            have_epoch = true;
        } catch (const ValidationError& e) {
            s.status = "skipped";
            s.reason = e.what();
        }
        report.stages.push_back(s);
        }
    epoch_done:;
    }

    // stage 5: second Carleman inequality on the reversed vorticity
    {
        PipelineStage s;
        s.name = "second_carleman";
        if (!have_epoch) {
            s.status = "skipped";
            s.reason = "no epoch available";
        } else {
            const double T = epoch_end - epoch_begin;
            const double r = std::sqrt(4000.0 * T) * 1.05;
            const double t0 = T / 2000.0;
            const double t1 = t0 / 4.0;
            carleman::SecondInequalityParams params;
            params.C0 = opts.carleman_C0;
            params.T = T;
            params.r = r;
            s.inputs = {{"T", T},
                        {"r", r},
                        {"t0", t0},
                        {"t1", t1},
                        {"x_offset", {last.x[0], last.x[1], last.x[2]}},
                        {"ball_exceeds_box", r > traj.config.grid.L / 4.0}};
            try {
                const auto field = carleman::trajectory_vorticity_field(traj, epoch_end, last.x);
                const auto rep = carleman::second_inequality_report(field, params, t0, t1, opts.carleman_res);
                s.status = "ok";
                s.data = rep.to_json();
            } catch (const ValidationError& e) {
                s.status = "skipped";
                s.reason = e.what();
            }
        }
        report.stages.push_back(s);
    }

    // stage 6: Gaussian lower bound record
    {
        PipelineStage s;
        s.name = "gaussian_lower_bound";
        const double R = std::min(consts.A_j(1) * std::sqrt(T1), g.L / 8.0);
        const double t_hi = seed.t - T1 / consts.A_j(1);
        const double t_lo = seed.t - T1;
        s.inputs = {{"R", R}, {"t_lo", t_lo}, {"t_hi", t_hi}};
        if (t_lo < traj.start_time() - 1e-12) {
            s.status = "skipped";
            s.reason = "window extends before trajectory start";
        } else {
            double mass = 0.0;
            double prev_t = 0.0, prev_slice = 0.0;
            bool first = true;
            for (int i = 0; i < traj.size(); ++i) {
                if (traj.times[i] < t_lo - 1e-12 || traj.times[i] > t_hi + 1e-12) continue;
                const SpectralField omega = spectral::curl(traj.snapshots[i]);
                const RealField w = spectral::inverse_transform_unchecked(omega);
                double slice = 0.0;
                std::int64_t idx = 0;
                for (int i0 = 0; i0 < g.n; ++i0)
                    for (int i1 = 0; i1 < g.n; ++i1)
                        for (int i2 = 0; i2 < g.n; ++i2, ++idx) {
                            const double d = g.periodic_distance(g.point(i0, i1, i2), seed.x);
                            if (d >= R / 2.0 && d <= 2.0 * R) {
                                const double m = w.magnitude(idx);
                                slice += m * m;
                            }
                        }
                slice *= g.cell_volume();
                if (!first) mass += 0.5 * (slice + prev_slice) * (traj.times[i] - prev_t);
                prev_t = traj.times[i];
                prev_slice = slice;
                first = false;
            }
            const double log_rhs = -std::pow(consts.A_j(5), 4.0) * R * R / T1 + 0.5 * std::log(T1);
            s.status = "ok";
            s.data = {{"lhs", mass}, {"rhs_log", log_rhs},
                      {"lhs_log", mass > 0.0 ? std::log(mass) : -1e300},
                      {"dominates", mass > 0.0 && std::log(mass) >= log_rhs}};
        }
        report.stages.push_back(s);
    }

    // stage 7: annulus of regularity
    bool have_annulus = false;
    concentration::Annulus annulus;
    {
        PipelineStage s;
        s.name = "annulus";
        const double R0 = opts.annulus_R0 > 0.0 ? opts.annulus_R0 : g.L / 16.0;
        const double T_prime = std::min(T1 / 4.0, span / 4.0);
        s.inputs = {{"x0", {seed.x[0], seed.x[1], seed.x[2]}},
                    {"T_prime", T_prime},
                    {"R0", R0},
                    {"kappa", opts.annulus_kappa},
                    {"n_scales", opts.annulus_scales}};
        try {
            annulus = concentration::find_annulus(traj, seed.x, T_prime, R0, opts.annulus_kappa,
                                                  opts.annulus_scales);
            s.status = "ok";
            s.data = annulus.to_json();
            have_annulus = true;
        } catch (const ValidationError& e) {
            s.status = "skipped";
            s.reason = e.what();
        }
        report.stages.push_back(s);
    }

    // stage 8: first Carleman inequality on the annulus
    {
        PipelineStage s;
        s.name = "first_carleman";
        if (!have_annulus) {
            s.status = "skipped";
            s.reason = "no annulus available";
        } else {
            carleman::FirstInequalityParams params;
            params.C0 = opts.carleman_C0;
            params.r_minus = annulus.R;
            params.r_plus = annulus.kappa * annulus.R;
            params.T = std::min(annulus.t_end - annulus.t_begin,
                                annulus.R * annulus.R / (4.0 * params.C0) * 0.99);
            s.inputs = {{"r_minus", params.r_minus}, {"r_plus", params.r_plus}, {"T", params.T},
                        {"C0", params.C0}};
            try {
                const auto field = carleman::trajectory_vorticity_field(traj, annulus.t_end, seed.x);
                const auto rep = carleman::first_inequality_report(field, params, opts.carleman_res);
                s.status = "ok";
                s.data = rep.to_json();
            } catch (const ValidationError& e) {
                s.status = "skipped";
                s.reason = e.what();
            }
        }
        report.stages.push_back(s);
    }

    // stage 9: final annular L^3 mass
    {
        PipelineStage s;
        s.name = "final_l3_mass";
        if (!have_annulus) {
            s.status = "skipped";
            s.reason = "no annulus available";
        } else {
            const int i = traj.index_of_time(traj.end_time());
            const RealField u = spectral::inverse_transform_unchecked(traj.snapshots[i]);
            double mass = 0.0;
            std::int64_t idx = 0;
            for (int i0 = 0; i0 < g.n; ++i0)
                for (int i1 = 0; i1 < g.n; ++i1)
                    for (int i2 = 0; i2 < g.n; ++i2, ++idx) {
                        const double d = g.periodic_distance(g.point(i0, i1, i2), seed.x);
                        if (d >= annulus.R && d <= annulus.kappa * annulus.R) {
                            const double m = u.magnitude(idx);
                            mass += m * m * m;
                        }
                    }
            mass *= g.cell_volume();
            s.inputs = {{"R", annulus.R}, {"kappa", annulus.kappa}, {"t", traj.end_time()}};
            s.status = "ok";
            s.data = {{"l3_mass_cubed", mass}};
        }
        report.stages.push_back(s);
    }

    return report;
}

}  // namespace experiment
}  // namespace cns
