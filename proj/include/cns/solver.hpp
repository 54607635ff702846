#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cns/spectral_core.hpp"

namespace cns {
namespace solver {

/// Viscosity is normalised to one; dealiasing uses the 2/3 rule by default.
struct SolverConfig {
    Grid3 grid;
    double dt = 0.0;
    double t_end = 0.0;
    double dealias_fraction = 2.0 / 3.0;
    int snapshot_stride = 1;
    double start_time = 0.0;

    void validate() const {
        require(dt > 0.0, "SolverConfig: dt must be positive");
        require(t_end > start_time, "SolverConfig: t_end must exceed start_time");
        require(dealias_fraction > 0.0 && dealias_fraction <= 2.0 / 3.0 + 1e-12,
                "SolverConfig: dealias_fraction must lie in (0, 2/3]");
        require(snapshot_stride >= 1, "SolverConfig: snapshot_stride must be >= 1");
    }
};

struct SnapshotDiagnostics {
    double energy = 0.0;        // (1/2) ||u||_2^2
    double enstrophy = 0.0;     // (1/2) ||omega||_2^2
    double l3_norm = 0.0;       // ||u(t)||_3
    double linf_norm = 0.0;     // ||u(t)||_inf
    double dissipation_accum = 0.0;  // int_0^t ||grad u||_2^2 ds, stage-quadrature accurate
    double total_speed_accum = 0.0;  // int_0^t ||u||_inf ds
};

struct HaltRecord {
    double time = 0.0;
    int step_index = 0;
    std::string reason;
};

struct TrajectoryRecord {
    SolverConfig config;
    std::vector<double> times;
    std::vector<SpectralField> snapshots;
    std::vector<SnapshotDiagnostics> diagnostics;
    std::optional<HaltRecord> halt;

    int size() const { return static_cast<int>(times.size()); }
    /// Index of the snapshot at time t (within tol * dt); throws if absent.
    int index_of_time(double t, double rel_tol = 1e-9) const;
    double start_time() const { return times.front(); }
    double end_time() const { return times.back(); }
};

/// -P_deal Leray div(u (x) u), products formed in physical space with the
/// 2/3-rule truncation. Rejects inputs that are not divergence-free.
SpectralField nonlinear_term(const SpectralField& uh, double dealias_fraction = 2.0 / 3.0);

/// Accumulators advanced alongside the state with the same RK4 stage weights.
struct StepAccumulators {
    double dissipation = 0.0;
    double total_speed = 0.0;
};

/// One integrating-factor RK4 step (exact on the linear heat part).
/// Rejects steps violating both CFL-type sanity bounds; throws SolverHaltError
/// on non-finite output.
SpectralField step(const SpectralField& state, double dt, double dealias_fraction = 2.0 / 3.0,
                   StepAccumulators* accum = nullptr, double* linf_out = nullptr);

TrajectoryRecord run(const SolverConfig& config, const SpectralField& initial);

/// Pressure with zero mean: p = -inv_lap d_i d_j (u_i u_j).
SpectralField pressure_field(const SpectralField& uh, double dealias_fraction = 2.0 / 3.0);

/// Right side of the vorticity equation: Lap(omega) - P_deal[(u.grad)omega - (omega.grad)u].
/// Rejects omega that is not curl(u) within tolerance.
SpectralField vorticity_rhs(const SpectralField& uh, const SpectralField& wh,
                            double dealias_fraction = 2.0 / 3.0, double compat_tol = 1e-8);

/// u^lambda(t,x) = lambda u(lambda^2 t, lambda x) realised on the nested grid
/// with box L/lambda; lambda = 2^m. Diagnostics recomputed.
TrajectoryRecord rescale_solution(const TrajectoryRecord& traj, double lambda);

struct ResidualReport {
    std::vector<double> times;
    std::vector<double> residuals;  // ||d_t u - Lap u + P grad.(u x u)||_2, centered d_t
    double max_residual = 0.0;
};

ResidualReport residual_check(const TrajectoryRecord& traj);

/// Largest violation of E(t2) + int ||grad u||^2 <= E(t1) along the stored
/// trajectory, relative to the initial energy, per unit time.
double energy_inequality_violation(const TrajectoryRecord& traj);

// -- initial data library ----------------------------------------------------

SpectralField taylor_green(const Grid3& grid, double amplitude = 1.0);
SpectralField shear_flow(const Grid3& grid, double amplitude = 1.0);
/// Divergence-free random field with modes in [k_min, k_max] (index units),
/// optional Gaussian spatial envelope of width sigma (0 disables), dealiased.
SpectralField random_divfree_band(const Grid3& grid, std::uint64_t seed, int k_min, int k_max, double amplitude,
                                  double envelope_sigma = 0.0);
/// Random band-limited scalar (mean zero).
SpectralField random_scalar_band(const Grid3& grid, std::uint64_t seed, int k_min, int k_max, double amplitude);

}  // namespace solver
}  // namespace cns
