#pragma once

#include "cns/solver.hpp"

namespace cns {
namespace solver {

/// u = u_lin + u_nl with u_lin(t) = e^{(t - t_ref) Lap} u(t_ref).
/// Holds only the reference snapshot; components are reconstructed on demand.
struct DuhamelSplit {
    double t_ref = 0.0;
    SpectralField ref_state;
    double sup_unl_l2 = 0.0;       // sup_t ||u_nl(t)||_2 over stored times >= t_ref
    double dissipation_unl = 0.0;  // trapezoidal int ||grad u_nl||_2^2 dt

    SpectralField linear_at(double t) const {
        require(t >= t_ref, "DuhamelSplit: t must be >= t_ref");
        return spectral::heat_propagate(ref_state, t - t_ref);
    }
    SpectralField nonlinear_at(const SpectralField& u, double t) const {
        SpectralField nl = u;
        nl -= linear_at(t);
        return nl;
    }
};

DuhamelSplit duhamel_split(const TrajectoryRecord& traj, double t_ref);

}  // namespace solver
}  // namespace cns
