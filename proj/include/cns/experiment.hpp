#pragma once

#include "cns/carleman_check.hpp"
#include "cns/concentration.hpp"
#include "cns/config.hpp"
#include "cns/enstrophy_ledger.hpp"
#include "cns/report_io.hpp"

namespace cns {
namespace experiment {

struct ExperimentSpec {
    ExperimentConfig config;
    std::string out_dir;
    bool write_snapshots = true;
    bool diagnostics_csv = true;
    bool global_ledger = false;
    bool local_ledger = false;
    carleman::MovingCutoff cutoff;  // used when local_ledger is set
};

struct ExperimentResult {
    report::Manifest manifest;
    bool halted = false;
    solver::TrajectoryRecord trajectory;
};

/// Runs the solver, persists snapshots + diagnostics + selected reports, and
/// writes a manifest with content hashes. Reruns with the same seed are
/// bit-identical. A solver halt yields partial artifacts plus a halt record.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Reload a trajectory persisted by run_experiment.
solver::TrajectoryRecord load_trajectory(const std::string& dir);

struct PipelineStage {
    std::string name;
    std::string status;  // "ok" | "skipped"
    std::string reason;  // populated when skipped
    nlohmann::json inputs;
    nlohmann::json data;
};

struct PipelineReport {
    nlohmann::json params;
    std::vector<PipelineStage> stages;
    nlohmann::json to_json() const;
    static PipelineReport from_json(const nlohmann::json& j);
    const PipelineStage* find(const std::string& name) const;
};

struct PipelineOptions {
    double T1 = 0.0;  // lookback window; 0 selects half the trajectory span
    int epoch_subdivisions = 4;
    double annulus_R0 = 0.0;  // 0 selects L/16
    double annulus_kappa = 2.0;
    int annulus_scales = 2;
    carleman::QuadratureResolution carleman_res{12, 8, 12, 6, 32};
    double carleman_C0 = 4.0;
};

/// The staged main-estimate walkthrough: back propagation, vorticity lower
/// bound, epoch, second Carleman, Gaussian lower bound, annulus, first
/// Carleman, final annular L^3 mass. Stages whose preconditions fail are
/// recorded as skipped with the reason; nothing is asserted.
PipelineReport pipeline_main_estimate(const solver::TrajectoryRecord& traj,
                                      const concentration::ConcentrationEvent& seed,
                                      const concentration::SurrogateConstants& consts,
                                      const PipelineOptions& opts = {});

}  // namespace experiment
}  // namespace cns
