#include "cns/radial_weights.hpp"

#include <cmath>

#include "cns/errors.hpp"

namespace cns {
namespace radial {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

// antiderivatives of r sin(sr) and r^2 sin(sr)
double int_r_sin(double s, double r) { return (std::sin(s * r) - s * r * std::cos(s * r)) / (s * s); }
double int_r2_sin(double s, double r) {
    const double sr = s * r;
    return (2.0 * sr * std::sin(sr) + (2.0 - sr * sr) * std::cos(sr)) / (s * s * s);
}
}  // namespace

double PiecewiseLinearRadial::value(double r) const {
    for (const auto& p : pieces)
        if (r >= p.a && r <= p.b) return p.c + p.m * r;
    return 0.0;
}

double PiecewiseLinearRadial::integral() const {
    double acc = 0.0;
    for (const auto& p : pieces) {
        // int (c + m r) r^2 dr = c r^3/3 + m r^4/4
        acc += p.c * (p.b * p.b * p.b - p.a * p.a * p.a) / 3.0 +
               p.m * (p.b * p.b * p.b * p.b - p.a * p.a * p.a * p.a) / 4.0;
    }
    return 4.0 * M_PI * acc;
}

double PiecewiseLinearRadial::fourier(double rho) const {
    if (rho == 0.0) return integral();
    const double s = kTwoPi * rho;
    double acc = 0.0;
    for (const auto& p : pieces) {
        acc += p.c * (int_r_sin(s, p.b) - int_r_sin(s, p.a));
        acc += p.m * (int_r2_sin(s, p.b) - int_r2_sin(s, p.a));
    }
    return 2.0 / rho * acc;
}

PiecewiseLinearRadial eta_profile(double R_minus, double R_plus, double A6) {
    require(R_minus > 0.0 && R_plus > R_minus, "eta_profile: need 0 < R- < R+");
    require(A6 > 0.0, "eta_profile: A6 must be positive");
    require(R_minus + A6 <= R_plus - A6, "eta_profile: plateau collapsed (R- + A6 > R+ - A6)");
    PiecewiseLinearRadial h;
    h.pieces.push_back({R_minus, R_minus + A6, -R_minus, 1.0});     // r - R-
    h.pieces.push_back({R_minus + A6, R_plus - A6, A6, 0.0});       // plateau
    h.pieces.push_back({R_plus - A6, R_plus, R_plus, -1.0});        // R+ - r
    return h;
}

PiecewiseLinearRadial shell_indicator(double a, double b) {
    require(b > a && a >= 0.0, "shell_indicator: need 0 <= a < b");
    PiecewiseLinearRadial h;
    h.pieces.push_back({a, b, 1.0, 0.0});
    return h;
}

double fourier_inverse_r_shell(double a, double b, double q, double rho) {
    require(b > a && a > 0.0, "fourier_inverse_r_shell: need 0 < a < b");
    if (rho == 0.0) {
        // 4 pi int (q/r) r^2 dr = 4 pi q (b^2 - a^2)/2
        return 2.0 * M_PI * q * (b * b - a * a);
    }
    const double s = kTwoPi * rho;
    // (2/rho) int q sin(s r) dr = (2 q/rho) (cos(s a) - cos(s b))/s
    return 2.0 * q / rho * (std::cos(s * a) - std::cos(s * b)) / s;
}

double sphere_j0(double xi_norm, double rho) {
    const double z = kTwoPi * xi_norm * rho;
    if (std::abs(z) < 1e-8) return 4.0 * M_PI * (1.0 - z * z / 6.0);
    return 4.0 * M_PI * std::sin(z) / z;
}

}  // namespace radial
}  // namespace cns
