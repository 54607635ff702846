#include "cns/solver.hpp"

#include <algorithm>
#include <cmath>

#include "cns/rng.hpp"

namespace cns {
namespace solver {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

using spectral::apply_dealias_mask;
using spectral::forward_transform;
using spectral::inverse_transform_unchecked;

/// e^{dt Lap} as a reusable per-mode factor table.
std::vector<double> heat_factors(const Grid3& g, double dt) {
    std::vector<double> f(static_cast<size_t>(g.size()));
    std::int64_t idx = 0;
    for (int i0 = 0; i0 < g.n; ++i0)
        for (int i1 = 0; i1 < g.n; ++i1)
            for (int i2 = 0; i2 < g.n; ++i2) f[idx++] = std::exp(-kTwoPi * kTwoPi * g.frequency(i0, i1, i2).norm_sq() * dt);
    return f;
}

void scale_by(SpectralField& fh, const std::vector<double>& factors) {
    for (int c = 0; c < fh.components; ++c) {
        Complex* dst = fh.component(c);
        for (std::int64_t i = 0; i < fh.modes(); ++i) dst[i] *= factors[i];
    }
}

/// Nonlinear term with the physical field returned for diagnostics reuse.
SpectralField nonlinear_term_impl(const SpectralField& uh, double fraction, RealField* u_phys_out) {
    const Grid3& g = uh.grid;
    RealField u = inverse_transform_unchecked(uh);

    // symmetric tensor u_i u_j, 6 distinct entries
    static const int pair_i[6] = {0, 0, 0, 1, 1, 2};
    static const int pair_j[6] = {0, 1, 2, 1, 2, 2};
    SpectralField tensor_hat[6];
    {
        RealField prod(g, 1);
        for (int p = 0; p < 6; ++p) {
            const double* a = u.component(pair_i[p]);
            const double* b = u.component(pair_j[p]);
            for (std::int64_t m = 0; m < g.size(); ++m) prod.values[m] = a[m] * b[m];
            tensor_hat[p] = spectral::forward_transform_unchecked(prod);
        }
    }

    SpectralField out(g, 3);
    const int n = g.n;
    auto tensor_at = [&](int i, int j, std::int64_t flat) -> Complex {
        for (int p = 0; p < 6; ++p)
            if ((pair_i[p] == i && pair_j[p] == j) || (pair_i[p] == j && pair_j[p] == i))
                return tensor_hat[p].coeffs[flat];
        return 0.0;
    };
    std::int64_t flat = 0;
    for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2, ++flat) {
                const int idx[3] = {i0, i1, i2};
                double kfreq[3];
                for (int a = 0; a < 3; ++a)
                    kfreq[a] = idx[a] == n / 2 ? 0.0 : kTwoPi * g.signed_index(idx[a]) / g.L;
                // (div(u x u))_i = sum_j 2 pi i xi_j (u_i u_j)^
                Complex div[3];
                for (int i = 0; i < 3; ++i) {
                    Complex s = 0.0;
                    for (int j = 0; j < 3; ++j) s += Complex(0.0, kfreq[j]) * tensor_at(i, j, flat);
                    div[i] = s;
                }
                // Leray projection
                const Vec3 xi = g.frequency(i0, i1, i2);
                const double s2 = xi.norm_sq();
                if (s2 > 0.0) {
                    Complex dot = 0.0;
                    for (int i = 0; i < 3; ++i) dot += xi[i] * div[i];
                    dot /= s2;
                    for (int i = 0; i < 3; ++i) div[i] -= xi[i] * dot;
                }
                for (int i = 0; i < 3; ++i) out.at(i, i0, i1, i2) = -div[i];
            }
    apply_dealias_mask(out, fraction);
    if (u_phys_out) *u_phys_out = std::move(u);
    return out;
}

}  // namespace

int TrajectoryRecord::index_of_time(double t, double rel_tol) const {
    const double tol = rel_tol * std::max(1.0, std::abs(times.back() - times.front()));
    for (int i = 0; i < size(); ++i)
        if (std::abs(times[i] - t) <= tol) return i;
    throw ValidationError("TrajectoryRecord: time " + std::to_string(t) + " is not a stored snapshot");
}

SpectralField nonlinear_term(const SpectralField& uh, double dealias_fraction) {
    require(uh.components == 3, "nonlinear_term: 3-component field required");
    require(spectral::relative_divergence(uh) <= 1e-8, "nonlinear_term: input is not divergence-free");
    return nonlinear_term_impl(uh, dealias_fraction, nullptr);
}

SpectralField step(const SpectralField& state, double dt, double dealias_fraction, StepAccumulators* accum,
                   double* linf_out) {
    require(dt > 0.0, "step: dt must be positive");
    const Grid3& g = state.grid;

    RealField u_phys;
    SpectralField g1 = nonlinear_term_impl(state, dealias_fraction, &u_phys);
    const double linf = spectral::lp_norm(u_phys, std::numeric_limits<double>::infinity());
    if (linf_out) *linf_out = linf;

    const double h = g.spacing();
    require(dt <= h * h / 4.0 || dt * linf <= h,
            "step: CFL sanity failed (dt > h^2/4 and dt*|u|_inf > h)");

    const std::vector<double> e_half = heat_factors(g, dt / 2.0);
    const std::vector<double> e_full = heat_factors(g, dt);

    // Integrating-factor RK4 regrouped so every propagator decays:
    //   s2 = E2(u + dt/2 g1),  s3 = E2 u + dt/2 g2,  s4 = E1 u + dt E2 g3,
    //   u' = E1 u + dt/6 (E1 g1 + 2 E2 g2 + 2 E2 g3 + g4),  E2 = e^{L dt/2}.
    RealField u2, u3, u4;
    SpectralField s2 = state;
    for (size_t i = 0; i < s2.coeffs.size(); ++i) s2.coeffs[i] += dt / 2.0 * g1.coeffs[i];
    scale_by(s2, e_half);
    SpectralField g2 = nonlinear_term_impl(s2, dealias_fraction, &u2);

    SpectralField s3 = state;
    scale_by(s3, e_half);
    for (size_t i = 0; i < s3.coeffs.size(); ++i) s3.coeffs[i] += dt / 2.0 * g2.coeffs[i];
    SpectralField g3 = nonlinear_term_impl(s3, dealias_fraction, &u3);

    SpectralField s4 = state;
    scale_by(s4, e_full);
    {
        SpectralField g3_half = g3;
        scale_by(g3_half, e_half);
        for (size_t i = 0; i < s4.coeffs.size(); ++i) s4.coeffs[i] += dt * g3_half.coeffs[i];
    }
    SpectralField g4 = nonlinear_term_impl(s4, dealias_fraction, &u4);

    SpectralField next = state;
    scale_by(next, e_full);
    {
        SpectralField g1_full = g1;
        scale_by(g1_full, e_full);
        SpectralField g2_half = g2;
        scale_by(g2_half, e_half);
        SpectralField g3_half = g3;
        scale_by(g3_half, e_half);
        for (size_t i = 0; i < next.coeffs.size(); ++i)
            next.coeffs[i] += dt / 6.0 * (g1_full.coeffs[i] + 2.0 * g2_half.coeffs[i] + 2.0 * g3_half.coeffs[i] +
                                          g4.coeffs[i]);
    }

    if (accum) {
        const double d1 = spectral::dissipation_norm_sq(state);
        const double d2 = spectral::dissipation_norm_sq(s2);
        const double d3 = spectral::dissipation_norm_sq(s3);
        const double d4 = spectral::dissipation_norm_sq(s4);
        accum->dissipation += dt / 6.0 * (d1 + 2.0 * d2 + 2.0 * d3 + d4);
        const double inf1 = linf;
        const double inf2 = spectral::lp_norm(u2, std::numeric_limits<double>::infinity());
        const double inf3 = spectral::lp_norm(u3, std::numeric_limits<double>::infinity());
        const double inf4 = spectral::lp_norm(u4, std::numeric_limits<double>::infinity());
        accum->total_speed += dt / 6.0 * (inf1 + 2.0 * inf2 + 2.0 * inf3 + inf4);
    }

    for (const auto& c : next.coeffs) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw SolverHaltError("step: non-finite state, blowup suspected", std::nan(""));
    }
    return next;
}

TrajectoryRecord run(const SolverConfig& config, const SpectralField& initial) {
    config.validate();
    require(initial.grid == config.grid, "run: initial data grid mismatch");
    require(initial.components == 3, "run: initial data must be a 3-vector field");
    require(spectral::relative_divergence(initial) <= 1e-8, "run: initial data is not divergence-free");

    TrajectoryRecord traj;
    traj.config = config;

    SpectralField state = initial;
    apply_dealias_mask(state, config.dealias_fraction);

    StepAccumulators accum;
    const int n_steps = static_cast<int>(std::round((config.t_end - config.start_time) / config.dt));

    auto record = [&](double time) {
        SnapshotDiagnostics d;
        d.energy = 0.5 * spectral::l2_norm(state) * spectral::l2_norm(state);
        const SpectralField omega = spectral::curl(state);
        d.enstrophy = 0.5 * spectral::l2_norm(omega) * spectral::l2_norm(omega);
        const RealField u = inverse_transform_unchecked(state);
        d.l3_norm = spectral::lp_norm(u, 3.0);
        d.linf_norm = spectral::lp_norm(u, std::numeric_limits<double>::infinity());
        d.dissipation_accum = accum.dissipation;
        d.total_speed_accum = accum.total_speed;
        traj.times.push_back(time);
        traj.snapshots.push_back(state);
        traj.diagnostics.push_back(d);
    };

    record(config.start_time);
    for (int s = 1; s <= n_steps; ++s) {
        try {
            state = step(state, config.dt, config.dealias_fraction, &accum);
        } catch (const SolverHaltError&) {
            traj.halt = HaltRecord{config.start_time + (s - 1) * config.dt, s - 1,
                                   "non-finite state, blowup suspected"};
            return traj;
        }
        if (s % config.snapshot_stride == 0 || s == n_steps) record(config.start_time + s * config.dt);
    }
    return traj;
}

SpectralField pressure_field(const SpectralField& uh, double dealias_fraction) {
    require(uh.components == 3, "pressure_field: 3-component field required");
    require(spectral::relative_divergence(uh) <= 1e-8, "pressure_field: input is not divergence-free");
    const Grid3& g = uh.grid;
    RealField u = inverse_transform_unchecked(uh);
    static const int pair_i[6] = {0, 0, 0, 1, 1, 2};
    static const int pair_j[6] = {0, 1, 2, 1, 2, 2};
    SpectralField p(g, 1);
    RealField prod(g, 1);
    for (int q = 0; q < 6; ++q) {
        const double* a = u.component(pair_i[q]);
        const double* b = u.component(pair_j[q]);
        for (std::int64_t m = 0; m < g.size(); ++m) prod.values[m] = a[m] * b[m];
        SpectralField th = forward_transform(prod);
        const double mult = pair_i[q] == pair_j[q] ? 1.0 : 2.0;
        const int n = g.n;
        std::int64_t flat = 0;
        for (int i0 = 0; i0 < n; ++i0)
            for (int i1 = 0; i1 < n; ++i1)
                for (int i2 = 0; i2 < n; ++i2, ++flat) {
                    const int idx[3] = {i0, i1, i2};
                    double kf[3];
                    for (int a2 = 0; a2 < 3; ++a2)
                        kf[a2] = idx[a2] == n / 2 ? 0.0 : kTwoPi * g.signed_index(idx[a2]) / g.L;
                    const Vec3 xi = g.frequency(i0, i1, i2);
                    const double s2 = kTwoPi * kTwoPi * xi.norm_sq();
                    if (s2 == 0.0) continue;
                    // p^ = - d_i d_j (u_i u_j)^ / (-|2 pi xi|^2)
                    const Complex dd = Complex(0.0, kf[pair_i[q]]) * Complex(0.0, kf[pair_j[q]]) * th.coeffs[flat];
                    p.coeffs[flat] += mult * dd / s2;
                }
    }
    apply_dealias_mask(p, dealias_fraction);
    return p;
}

SpectralField vorticity_rhs(const SpectralField& uh, const SpectralField& wh, double dealias_fraction,
                            double compat_tol) {
    require(uh.components == 3 && wh.components == 3, "vorticity_rhs: 3-component fields required");
    const SpectralField curl_u = spectral::curl(uh);
    const double scale = spectral::max_abs_coeff(curl_u);
    double mismatch = 0.0;
    for (size_t i = 0; i < wh.coeffs.size(); ++i) mismatch = std::max(mismatch, std::abs(wh.coeffs[i] - curl_u.coeffs[i]));
    require(scale == 0.0 || mismatch <= compat_tol * scale, "vorticity_rhs: omega is not curl(u)");

    const Grid3& g = uh.grid;
    const RealField u = inverse_transform_unchecked(uh);
    const RealField w = inverse_transform_unchecked(wh);
    RealField dw[3][3], du[3][3];
    for (int c = 0; c < 3; ++c)
        for (int a = 0; a < 3; ++a) {
            dw[c][a] = RealField(g, 1);
            du[c][a] = RealField(g, 1);
        }
    for (int a = 0; a < 3; ++a) {
        const SpectralField dwa = spectral::derivative(wh, a);
        const SpectralField dua = spectral::derivative(uh, a);
        const RealField rw = inverse_transform_unchecked(dwa);
        const RealField ru = inverse_transform_unchecked(dua);
        for (int c = 0; c < 3; ++c) {
            std::copy(rw.component(c), rw.component(c) + g.size(), dw[c][a].values.begin());
            std::copy(ru.component(c), ru.component(c) + g.size(), du[c][a].values.begin());
        }
    }
    RealField rhs(g, 3);
    for (int c = 0; c < 3; ++c) {
        double* dst = rhs.component(c);
        for (std::int64_t m = 0; m < g.size(); ++m) {
            double transport = 0.0, stretch = 0.0;
            for (int a = 0; a < 3; ++a) {
                transport += u.component(a)[m] * dw[c][a].values[m];
                stretch += w.component(a)[m] * du[c][a].values[m];
            }
            dst[m] = -transport + stretch;
        }
    }
    SpectralField advect = forward_transform(rhs);
    apply_dealias_mask(advect, dealias_fraction);

    // add Lap(omega)
    const int n = g.n;
    std::int64_t flat = 0;
    for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2, ++flat) {
                const double s2 = kTwoPi * kTwoPi * g.frequency(i0, i1, i2).norm_sq();
                for (int c = 0; c < 3; ++c) advect.at(c, i0, i1, i2) -= s2 * wh.at(c, i0, i1, i2);
            }
    return advect;
}

TrajectoryRecord rescale_solution(const TrajectoryRecord& traj, double lambda) {
    const double m = std::log2(lambda);
    require(lambda > 0.0 && std::abs(m - std::round(m)) < 1e-12,
            "rescale_solution: lambda must be a power of two");
    TrajectoryRecord out;
    out.config = traj.config;
    out.config.grid = Grid3(traj.config.grid.n, traj.config.grid.L / lambda);
    out.config.dt = traj.config.dt / (lambda * lambda);
    out.config.t_end = traj.config.t_end / (lambda * lambda);
    out.config.start_time = traj.config.start_time / (lambda * lambda);
    out.halt = traj.halt;
    for (int i = 0; i < traj.size(); ++i) {
        SpectralField f = traj.snapshots[i];
        f.grid = out.config.grid;
        f *= lambda;
        out.times.push_back(traj.times[i] / (lambda * lambda));
        SnapshotDiagnostics d;
        d.energy = 0.5 * spectral::l2_norm(f) * spectral::l2_norm(f);
        const SpectralField omega = spectral::curl(f);
        d.enstrophy = 0.5 * spectral::l2_norm(omega) * spectral::l2_norm(omega);
        const RealField u = inverse_transform_unchecked(f);
        d.l3_norm = spectral::lp_norm(u, 3.0);
        d.linf_norm = spectral::lp_norm(u, std::numeric_limits<double>::infinity());
        d.dissipation_accum = traj.diagnostics[i].dissipation_accum / lambda;
        d.total_speed_accum = traj.diagnostics[i].total_speed_accum / lambda;
        out.diagnostics.push_back(d);
        out.snapshots.push_back(std::move(f));
    }
    return out;
}

ResidualReport residual_check(const TrajectoryRecord& traj) {
    ResidualReport rep;
    require(traj.size() >= 3, "residual_check: need at least 3 snapshots");
    for (int i = 1; i + 1 < traj.size(); ++i) {
        const double dt2 = traj.times[i + 1] - traj.times[i - 1];
        SpectralField dudt = traj.snapshots[i + 1];
        dudt -= traj.snapshots[i - 1];
        dudt *= 1.0 / dt2;
        SpectralField rhs = nonlinear_term_impl(traj.snapshots[i], traj.config.dealias_fraction, nullptr);
        const Grid3& g = traj.config.grid;
        const int n = g.n;
        std::int64_t flat = 0;
        for (int i0 = 0; i0 < n; ++i0)
            for (int i1 = 0; i1 < n; ++i1)
                for (int i2 = 0; i2 < n; ++i2, ++flat) {
                    const double s2 = kTwoPi * kTwoPi * g.frequency(i0, i1, i2).norm_sq();
                    for (int c = 0; c < 3; ++c)
                        rhs.at(c, i0, i1, i2) -= s2 * traj.snapshots[i].at(c, i0, i1, i2);
                }
        dudt -= rhs;
        rep.times.push_back(traj.times[i]);
        rep.residuals.push_back(spectral::l2_norm(dudt));
    }
    rep.max_residual = *std::max_element(rep.residuals.begin(), rep.residuals.end());
    return rep;
}

double energy_inequality_violation(const TrajectoryRecord& traj) {
    double worst = 0.0;
    const double scale = std::max(traj.diagnostics.front().energy, 1e-300);
    for (int i = 1; i < traj.size(); ++i) {
        const double lhs = traj.diagnostics[i].energy +
                           (traj.diagnostics[i].dissipation_accum - traj.diagnostics[i - 1].dissipation_accum);
        const double gap = lhs - traj.diagnostics[i - 1].energy;
        const double dt_span = std::max(traj.times[i] - traj.times[i - 1], 1e-300);
        worst = std::max(worst, gap / scale / dt_span);
    }
    return worst;
}

SpectralField taylor_green(const Grid3& grid, double amplitude) {
    RealField u(grid, 3);
    const double k = kTwoPi / grid.L;
    for (int i0 = 0; i0 < grid.n; ++i0)
        for (int i1 = 0; i1 < grid.n; ++i1)
            for (int i2 = 0; i2 < grid.n; ++i2) {
                const Vec3 x = grid.point(i0, i1, i2);
                u.at(0, i0, i1, i2) = amplitude * std::sin(k * x[0]) * std::cos(k * x[1]) * std::cos(k * x[2]);
                u.at(1, i0, i1, i2) = -amplitude * std::cos(k * x[0]) * std::sin(k * x[1]) * std::cos(k * x[2]);
                u.at(2, i0, i1, i2) = 0.0;
            }
    return spectral::forward_transform(u);
}

SpectralField shear_flow(const Grid3& grid, double amplitude) {
    RealField u(grid, 3);
    const double k = kTwoPi / grid.L;
    for (int i0 = 0; i0 < grid.n; ++i0)
        for (int i1 = 0; i1 < grid.n; ++i1)
            for (int i2 = 0; i2 < grid.n; ++i2) u.at(0, i0, i1, i2) = amplitude * std::sin(k * grid.point(i0, i1, i2)[1]);
    return spectral::forward_transform(u);
}

SpectralField random_divfree_band(const Grid3& grid, std::uint64_t seed, int k_min, int k_max, double amplitude,
                                  double envelope_sigma) {
    require(k_min >= 1 && k_max >= k_min, "random_divfree_band: need 1 <= k_min <= k_max");
    SpectralField f(grid, 3);
    const int n = grid.n;
    for (int c = 0; c < 3; ++c)
        for (int i0 = 0; i0 < n; ++i0)
            for (int i1 = 0; i1 < n; ++i1)
                for (int i2 = 0; i2 < n; ++i2) {
                    const double kk = std::sqrt(double(grid.signed_index(i0)) * grid.signed_index(i0) +
                                                double(grid.signed_index(i1)) * grid.signed_index(i1) +
                                                double(grid.signed_index(i2)) * grid.signed_index(i2));
                    if (kk < k_min - 0.5 || kk > k_max + 0.5) continue;
                    const std::int64_t a = f.flat(c, i0, i1, i2);
                    const std::int64_t b = f.flat(c, grid.conjugate_index(i0), grid.conjugate_index(i1),
                                                  grid.conjugate_index(i2));
                    if (a > b) continue;
                    CounterRng rng{seed, static_cast<std::uint64_t>(2 * a)};
                    const double re = rng.gaussian();
                    const double im = rng.gaussian();
                    if (a == b) {
                        f.coeffs[a] = Complex(re, 0.0);
                    } else {
                        f.coeffs[a] = Complex(re, im);
                        f.coeffs[b] = Complex(re, -im);
                    }
                }
    f = spectral::leray_project(f);
    if (envelope_sigma > 0.0) {
        RealField u = inverse_transform_unchecked(f);
        const Vec3 center{grid.L / 2.0, grid.L / 2.0, grid.L / 2.0};
        for (int i0 = 0; i0 < n; ++i0)
            for (int i1 = 0; i1 < n; ++i1)
                for (int i2 = 0; i2 < n; ++i2) {
                    const double d = grid.periodic_distance(grid.point(i0, i1, i2), center);
                    const double env = std::exp(-d * d / (2.0 * envelope_sigma * envelope_sigma));
                    for (int c = 0; c < 3; ++c) u.at(c, i0, i1, i2) *= env;
                }
        f = spectral::leray_project(spectral::forward_transform(u));
    }
    apply_dealias_mask(f, 2.0 / 3.0);
    const double norm = spectral::l2_norm(f);
    if (norm > 0.0) f *= amplitude / norm;
    return f;
}

SpectralField random_scalar_band(const Grid3& grid, std::uint64_t seed, int k_min, int k_max, double amplitude) {
    require(k_min >= 1 && k_max >= k_min, "random_scalar_band: need 1 <= k_min <= k_max");
    SpectralField f(grid, 1);
    const int n = grid.n;
    for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
                const double kk = std::sqrt(double(grid.signed_index(i0)) * grid.signed_index(i0) +
                                            double(grid.signed_index(i1)) * grid.signed_index(i1) +
                                            double(grid.signed_index(i2)) * grid.signed_index(i2));
                if (kk < k_min - 0.5 || kk > k_max + 0.5) continue;
                const std::int64_t a = f.flat(0, i0, i1, i2);
                const std::int64_t b =
                    f.flat(0, grid.conjugate_index(i0), grid.conjugate_index(i1), grid.conjugate_index(i2));
                if (a > b) continue;
                CounterRng rng{seed, static_cast<std::uint64_t>(2 * a)};
                const double re = rng.gaussian();
                const double im = rng.gaussian();
                if (a == b) {
                    f.coeffs[a] = Complex(re, 0.0);
                } else {
                    f.coeffs[a] = Complex(re, im);
                    f.coeffs[b] = Complex(re, -im);
                }
            }
    const double norm = spectral::l2_norm(f);
    if (norm > 0.0) f *= amplitude / norm;
    return f;
}

}  // namespace solver
}  // namespace cns
