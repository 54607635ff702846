#pragma once

#include <vector>

#include "cns/grid.hpp"

namespace cns {
namespace radial {

/// Compactly supported piecewise-linear radial profile h(r) = c + m r on
/// each piece [a,b]; closed-form 3D Fourier transform
///   h^(rho) = (2/rho) int h(r) r sin(2 pi rho r) dr  (value 4 pi int h r^2 dr at rho = 0).
struct PiecewiseLinearRadial {
    struct Piece {
        double a = 0.0, b = 0.0;  // radii
        double c = 0.0, m = 0.0;  // h(r) = c + m r on [a,b]
    };
    std::vector<Piece> pieces;

    double value(double r) const;
    double fourier(double rho) const;
    /// 4 pi int h(r) r^2 dr (the rho = 0 transform).
    double integral() const;
};

/// The moving-cutoff profile eta(r) = max(min(A6, r - R-, R+ - r), 0).
PiecewiseLinearRadial eta_profile(double R_minus, double R_plus, double A6);
/// Indicator of the shell a <= r <= b.
PiecewiseLinearRadial shell_indicator(double a, double b);

/// Fourier transform of q/r restricted to the shell [a,b].
double fourier_inverse_r_shell(double a, double b, double q, double rho);

/// Sphere average transform: int_{S^2} e^{2 pi i xi . (rho theta)} dtheta = 4 pi j0(2 pi |xi| rho).
double sphere_j0(double xi_norm, double rho);

}  // namespace radial
}  // namespace cns
