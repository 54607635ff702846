#include "cns/carleman_weight.hpp"

#include <cmath>

#include "cns/rng.hpp"

namespace cns {
namespace carleman {

CarlemanWeight weight_first(const WeightFirstParams& p) {
    require(p.C0 > 0.0 && p.T > 0.0, "weight_first: C0 and T must be positive");
    require(p.T0 >= p.T / 2.0 && p.T0 <= p.T, "weight_first: T0 must lie in [T/2, T]");
    require(p.r_minus > 0.0 && p.r_plus > p.r_minus, "weight_first: need 0 < r- < r+");
    require(p.r_minus * p.r_minus >= 4.0 * p.C0 * p.T, "weight_first: constraint r-^2 >= 4 C0 T violated");

    const double alpha = p.alpha();
    const double c = 1.0 / (p.C0 * p.T);  // coefficient of |x|^2

    CarlemanWeight w;
    w.params = {{"weight", "first"},
                {"C0", p.C0},
                {"T", p.T},
                {"T0", p.T0},
                {"r_minus", p.r_minus},
                {"r_plus", p.r_plus},
                {"alpha", alpha},
                {"alpha_variant", p.variant == AlphaVariant::PaperT2 ? "r+/(2 C0 T^2)" : "r+/(2 C0 T)"}};
    w.r_inner = p.r_minus;
    w.r_outer = p.r_plus;
    w.t_max = p.T0;
    const double T0 = p.T0;
    w.g = [alpha, c, T0](double t, const Vec3& x) {
        const double r = x.norm();
        return alpha * (T0 - t) * r + c * r * r;
    };
    w.grad_g = [alpha, c, T0](double t, const Vec3& x) {
        const double r = x.norm();
        const double radial = alpha * (T0 - t) + 2.0 * c * r;
        return Vec3{x[0] / r * radial, x[1] / r * radial, x[2] / r * radial};
    };
    w.hessian_quadratic = [alpha, c, T0](double t, const Vec3& x, const Vec3& v) {
        // Hess(|x|) = (I - xh xh^T)/|x|, Hess(|x|^2) = 2 I
        const double r = x.norm();
        const double xv = x.dot(v) / r;
        return alpha * (T0 - t) * (v.norm_sq() - xv * xv) / r + 2.0 * c * v.norm_sq();
    };
    w.F = [alpha, c, T0](double t, const Vec3& x) {
        const double r = x.norm();
        const double s = alpha * (T0 - t) + 2.0 * c * r;  // |grad g|
        return -alpha * r - 2.0 * alpha * (T0 - t) / r - 6.0 * c - s * s;
    };
    w.LF = [alpha, c, T0](double t, const Vec3& x) {
        const double r = x.norm();
        return 2.0 * alpha * alpha * (T0 - t) + 4.0 * alpha * c * r - 8.0 * alpha * c * (T0 - t) / r -
               24.0 * c * c;
    };
    return w;
}

CarlemanWeight weight_second(const WeightSecondParams& p) {
    require(p.T > 0.0, "weight_second: T must be positive");
    require(p.r > 0.0, "weight_second: r must be positive");
    require(p.r * p.r >= 4000.0 * p.T, "weight_second: constraint r^2 >= 4000 T violated");
    require(p.T0 > 0.0 && p.t1 > 0.0, "weight_second: T0 and t1 must be positive");

    const double alpha = p.alpha;
    const double T0 = p.T0;
    const double t1 = p.t1;

    CarlemanWeight w;
    w.params = {{"weight", "second"}, {"alpha", alpha}, {"T", p.T}, {"T0", T0}, {"t1", t1}, {"r", p.r}};
    w.r_inner = 0.0;
    w.r_outer = p.r;
    w.t_max = T0;
    w.time_singularity_offset = t1;
    w.g = [alpha, T0, t1](double t, const Vec3& x) {
        const double s = t + t1;
        return -x.norm_sq() / (4.0 * s) - 1.5 * std::log(s) - alpha * std::log(s / (T0 + t1)) +
               alpha * s / (T0 + t1);
    };
    w.grad_g = [t1](double t, const Vec3& x) {
        const double s = t + t1;
        return Vec3{-x[0] / (2.0 * s), -x[1] / (2.0 * s), -x[2] / (2.0 * s)};
    };
    w.hessian_quadratic = [t1](double t, const Vec3&, const Vec3& v) {
        return -v.norm_sq() / (2.0 * (t + t1));
    };
    w.F = [alpha, T0, t1](double t, const Vec3&) { return alpha / (T0 + t1) - alpha / (t + t1); };
    w.LF = [alpha, t1](double t, const Vec3&) {
        const double s = t + t1;
        return alpha / (s * s);
    };
    return w;
}

namespace {

/// 5-point central difference, 4th order.
template <typename F>
double fd_derivative(F&& f, double h) {
    return (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h);
}
template <typename F>
double fd_second(F&& f, double h) {
    return (-f(2.0 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2.0 * h)) / (12.0 * h * h);
}

}  // namespace

WeightCheck weight_consistency_check(const CarlemanWeight& w, int n_points, std::uint64_t seed,
                                     bool expect_nonpositive_F) {
    WeightCheck check;
    CounterRng rng{seed, 0};
    const double r_lo = w.r_inner > 0.0 ? 1.1 * w.r_inner : 0.1 * w.r_outer;
    const double r_hi = 0.9 * w.r_outer;
    for (int s = 0; s < n_points; ++s) {
        const double t = rng.uniform(0.05 * w.t_max, 0.95 * w.t_max);
        const double r = rng.uniform(r_lo, r_hi);
        // random direction
        const double mu = rng.uniform(-1.0, 1.0);
        const double ph = rng.uniform(0.0, 2.0 * M_PI);
        const double sq = std::sqrt(1.0 - mu * mu);
        const Vec3 x{r * sq * std::cos(ph), r * sq * std::sin(ph), r * mu};

        // step with the local time scale so singular weights keep 4th-order accuracy
        const double t_scale = w.time_singularity_offset > 0.0 ? t + w.time_singularity_offset : w.t_max;
        const double ht = 1e-3 * std::max(t_scale, 1e-12);
        const double hx = 1e-4 * std::max(r, 1e-6);

        // F = d_t g - Lap g - |grad g|^2 by finite differences of g
        const double dt_g = fd_derivative([&](double d) { return w.g(t + d, x); }, ht);
        double lap_g = 0.0;
        Vec3 grad;
        for (int a = 0; a < 3; ++a) {
            lap_g += fd_second(
                [&](double d) {
                    Vec3 y = x;
                    y[a] += d;
                    return w.g(t, y);
                },
                hx);
            grad[a] = fd_derivative(
                [&](double d) {
                    Vec3 y = x;
                    y[a] += d;
                    return w.g(t, y);
                },
                hx);
        }
        const double F_fd = dt_g - lap_g - grad.norm_sq();
        const double F_cf = w.F(t, x);
        const double scale_F = std::max({std::abs(F_cf), std::abs(F_fd), 1e-12});
        check.max_rel_err_F = std::max(check.max_rel_err_F, std::abs(F_fd - F_cf) / scale_F);

        // LF = (d_t + Lap) F by finite differences of the closed-form F
        const double dt_F = fd_derivative([&](double d) { return w.F(t + d, x); }, ht);
        double lap_F = 0.0;
        for (int a = 0; a < 3; ++a)
            lap_F += fd_second(
                [&](double d) {
                    Vec3 y = x;
                    y[a] += d;
                    return w.F(t, y);
                },
                hx);
        const double LF_fd = dt_F + lap_F;
        const double LF_cf = w.LF(t, x);
        const double scale_LF = std::max({std::abs(LF_cf), std::abs(LF_fd), 1e-12});
        check.max_rel_err_LF = std::max(check.max_rel_err_LF, std::abs(LF_fd - LF_cf) / scale_LF);

        if (expect_nonpositive_F && F_cf > 0.0) check.f_sign_ok = false;
        ++check.samples;
    }
    return check;
}

}  // namespace carleman
}  // namespace cns
