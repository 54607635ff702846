#include "cns/spacetime_field.hpp"

#include <cmath>
#include <memory>

namespace cns {
namespace carleman {

SpacetimeField reversed_heat_flow(const std::vector<GaussianMode>& modes, double t_final) {
    require(!modes.empty(), "reversed_heat_flow: need at least one mode");
    for (const auto& m : modes) require(m.sigma > 0.0, "reversed_heat_flow: sigma must be positive");

    auto kernel = [modes, t_final](double t, const Vec3& x, Vec3* grad_row0, Vec3* grad_row1, Vec3* grad_row2) {
        Vec3 val;
        for (const auto& m : modes) {
            const double s = m.sigma + (t_final - t);
            const Vec3 d = x - m.center;
            const double G = std::pow(4.0 * M_PI * s, -1.5) * std::exp(-d.norm_sq() / (4.0 * s));
            val = val + m.amplitude * G;
            if (grad_row0) {
                const Vec3 gG = d * (-G / (2.0 * s));
                *grad_row0 = *grad_row0 + gG * m.amplitude[0];
                *grad_row1 = *grad_row1 + gG * m.amplitude[1];
                *grad_row2 = *grad_row2 + gG * m.amplitude[2];
            }
        }
        return val;
    };

    SpacetimeField f;
    f.value = [kernel](double t, const Vec3& x) { return kernel(t, x, nullptr, nullptr, nullptr); };
    f.gradient = [kernel](double t, const Vec3& x) {
        Vec3 r0, r1, r2;
        kernel(t, x, &r0, &r1, &r2);
        Mat3 m;
        for (int j = 0; j < 3; ++j) {
            m(0, j) = r0[j];
            m(1, j) = r1[j];
            m(2, j) = r2[j];
        }
        return m;
    };
    f.heat_residual = [](double, const Vec3&) { return Vec3{}; };
    return f;
}

SpacetimeField polynomial_bump(const Vec3& amplitude, const Vec3& center, double radius) {
    require(radius > 0.0, "polynomial_bump: radius must be positive");
    const Vec3 a = amplitude;
    const Vec3 c = center;
    const double R = radius;

    auto profile = [R](double rho_sq) {  // (1 - rho^2)^3 with rho^2 = |x-c|^2/R^2
        const double q = 1.0 - rho_sq;
        return q <= 0.0 ? 0.0 : q * q * q;
    };
    SpacetimeField f;
    f.value = [a, c, R, profile](double t, const Vec3& x) {
        const double rho_sq = (x - c).norm_sq() / (R * R);
        return a * ((1.0 + t) * profile(rho_sq));
    };
    f.gradient = [a, c, R](double t, const Vec3& x) {
        const Vec3 d = x - c;
        const double rho_sq = d.norm_sq() / (R * R);
        Mat3 m;
        if (rho_sq >= 1.0) return m;
        const double q = 1.0 - rho_sq;
        // d/dx_j (q^3) = 3 q^2 * (-2 d_j / R^2)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = a[i] * (1.0 + t) * (-6.0 * q * q * d[j] / (R * R));
        return m;
    };
    f.heat_residual = [a, c, R, profile](double t, const Vec3& x) {
        const Vec3 d = x - c;
        const double rho_sq = d.norm_sq() / (R * R);
        if (rho_sq >= 1.0) return Vec3{};
        const double q = 1.0 - rho_sq;
        // Lap (q^3) = sum_j d^2/dx_j^2: with f(q), q = 1 - |d|^2/R^2:
        // grad q = -2 d / R^2,  Lap q = -6/R^2
        // Lap q^3 = 3 q^2 Lap q + 6 q |grad q|^2 = -18 q^2/R^2 + 24 q rho^2 / R^2
        const double lap = -18.0 * q * q / (R * R) + 24.0 * q * rho_sq / (R * R);
        const double dt_part = profile(rho_sq);  // d/dt of (1+t) q^3
        return a * (dt_part + (1.0 + t) * lap);
    };
    return f;
}

SpacetimeField trajectory_vorticity_field(const solver::TrajectoryRecord& traj, double t_anchor,
                                          const Vec3& x_offset) {
    require(traj.size() >= 2, "trajectory_vorticity_field: need at least two snapshots");

    // Precompute vorticity and residual source fields per snapshot.
    struct Frame {
        double time;
        SpectralField omega;
        SpectralField domega[3];  // spatial derivatives of omega
        SpectralField advect;     // (u.grad)omega - (omega.grad)u
    };
    auto frames = std::make_shared<std::vector<Frame>>();
    for (int i = 0; i < traj.size(); ++i) {
        Frame fr;
        fr.time = traj.times[i];
        fr.omega = spectral::curl(traj.snapshots[i]);
        for (int a = 0; a < 3; ++a) fr.domega[a] = spectral::derivative(fr.omega, a);
        // advect = -(vorticity_rhs - Lap omega), computed directly
        const Grid3& g = traj.config.grid;
        const RealField u = spectral::inverse_transform_unchecked(traj.snapshots[i]);
        const RealField w = spectral::inverse_transform_unchecked(fr.omega);
        RealField adv(g, 3);
        RealField dwp[3][3], dup[3][3];
        for (int a = 0; a < 3; ++a) {
            const RealField rw = spectral::inverse_transform_unchecked(fr.domega[a]);
            const RealField ru = spectral::inverse_transform_unchecked(spectral::derivative(traj.snapshots[i], a));
            for (int comp = 0; comp < 3; ++comp) {
                dwp[comp][a] = RealField(g, 1);
                dup[comp][a] = RealField(g, 1);
                std::copy(rw.component(comp), rw.component(comp) + g.size(), dwp[comp][a].values.begin());
                std::copy(ru.component(comp), ru.component(comp) + g.size(), dup[comp][a].values.begin());
            }
        }
        for (int comp = 0; comp < 3; ++comp)
            for (std::int64_t m = 0; m < g.size(); ++m) {
                double acc = 0.0;
                for (int a = 0; a < 3; ++a)
                    acc += u.component(a)[m] * dwp[comp][a].values[m] - w.component(a)[m] * dup[comp][a].values[m];
                adv.component(comp)[m] = acc;
            }
        fr.advect = spectral::forward_transform(adv);
        frames->push_back(std::move(fr));
    }

    auto locate = [frames](double s) {
        // clamped linear interpolation weights over snapshot times
        const auto& f = *frames;
        if (s <= f.front().time) return std::make_tuple(0, 0, 0.0);
        if (s >= f.back().time) return std::make_tuple(static_cast<int>(f.size()) - 1, static_cast<int>(f.size()) - 1, 0.0);
        for (size_t i = 0; i + 1 < f.size(); ++i)
            if (s >= f[i].time && s <= f[i + 1].time) {
                const double w = (s - f[i].time) / (f[i + 1].time - f[i].time);
                return std::make_tuple(static_cast<int>(i), static_cast<int>(i + 1), w);
            }
        return std::make_tuple(static_cast<int>(f.size()) - 1, static_cast<int>(f.size()) - 1, 0.0);
    };

    SpacetimeField out;
    out.value = [frames, locate, t_anchor, x_offset](double t, const Vec3& x) {
        const auto [i, j, w] = locate(t_anchor - t);
        const Vec3 y = x_offset + x;
        const Vec3 a = spectral::eval_at((*frames)[i].omega, y);
        const Vec3 b = spectral::eval_at((*frames)[j].omega, y);
        return a * (1.0 - w) + b * w;
    };
    out.gradient = [frames, locate, t_anchor, x_offset](double t, const Vec3& x) {
        const auto [i, j, w] = locate(t_anchor - t);
        const Vec3 y = x_offset + x;
        Mat3 m;
        for (int a = 0; a < 3; ++a) {
            const Vec3 gi = spectral::eval_at((*frames)[i].domega[a], y);
            const Vec3 gj = spectral::eval_at((*frames)[j].domega[a], y);
            for (int c = 0; c < 3; ++c) m(c, a) = (1.0 - w) * gi[c] + w * gj[c];
        }
        return m;
    };
    out.heat_residual = [frames, locate, t_anchor, x_offset](double t, const Vec3& x) {
        const auto [i, j, w] = locate(t_anchor - t);
        const Vec3 y = x_offset + x;
        const Vec3 a = spectral::eval_at((*frames)[i].advect, y);
        const Vec3 b = spectral::eval_at((*frames)[j].advect, y);
        return a * (1.0 - w) + b * w;
    };
    return out;
}

}  // namespace carleman
}  // namespace cns
