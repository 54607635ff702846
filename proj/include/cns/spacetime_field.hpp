#pragma once

#include <functional>
#include <vector>

#include "cns/solver.hpp"

namespace cns {
namespace carleman {

/// Smooth spacetime test field with analytic gradient and backward-heat
/// residual Lu = d_t u + Lap u.
struct SpacetimeField {
    std::function<Vec3(double, const Vec3&)> value;
    std::function<Mat3(double, const Vec3&)> gradient;  // gradient(i,j) = d u_i / d x_j
    std::function<Vec3(double, const Vec3&)> heat_residual;
};

struct GaussianMode {
    Vec3 amplitude;
    Vec3 center;
    double sigma = 0.1;  // initial spread s0 of the kernel clock
};

/// u(t,x) = sum_m a_m (4 pi s_m)^{-3/2} e^{-|x-c_m|^2/4 s_m}, s_m = sigma_m + (t_final - t).
/// Solves the backward heat equation exactly (Lu = 0) for t < t_final + sigma.
SpacetimeField reversed_heat_flow(const std::vector<GaussianMode>& modes, double t_final);

/// Compactly supported in space: u = a s(t) (1 - |x-c|^2/R^2)^3_+ with
/// s(t) = 1 + t. Lu is provided in closed form.
SpacetimeField polynomial_bump(const Vec3& amplitude, const Vec3& center, double radius);

/// omega(t_anchor - t, x_offset + x) built from trajectory snapshots:
/// spectral interpolation in space, linear interpolation in time. The
/// residual Lu follows from the vorticity equation:
/// Lu(t,x) = [(u.grad)omega - (omega.grad)u](t_anchor - t, x_offset + x).
SpacetimeField trajectory_vorticity_field(const solver::TrajectoryRecord& traj, double t_anchor,
                                          const Vec3& x_offset);

}  // namespace carleman
}  // namespace cns
