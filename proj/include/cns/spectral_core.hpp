#pragma once

#include "cns/field.hpp"

namespace cns {
namespace spectral {

/// Forward transform of a real field: coefficients c_k with
/// f(x) = sum_k c_k e^{2 pi i k.x/L}. Rejects non-finite samples.
SpectralField forward_transform(const RealField& f);

/// Forward transform without the finite check (solver internals let
/// non-finite values propagate to the blowup handler instead).
SpectralField forward_transform_unchecked(const RealField& f);

/// Inverse transform. Rejects inputs whose Hermitian asymmetry exceeds
/// `hermitian_tol` relative to the largest coefficient.
RealField inverse_transform(const SpectralField& fh, double hermitian_tol = 1e-10);

/// Inverse transform without the symmetry check (hot paths that construct
/// Hermitian data by design).
RealField inverse_transform_unchecked(const SpectralField& fh);

/// Largest |c(-k) - conj(c(k))| over all modes and components.
double hermitian_asymmetry(const SpectralField& fh);
/// Force exact Hermitian symmetry by averaging conjugate pairs.
void hermitian_symmetrize(SpectralField& fh);

double max_abs_coeff(const SpectralField& fh);

/// Per-mode projection Id - xi xi^T/|xi|^2 onto divergence-free fields.
/// The zero mode passes through unchanged. Rejects scalar input.
SpectralField leray_project(const SpectralField& uh);

/// e^{t Laplacian}: multiplies mode xi by e^{-4 pi^2 |xi|^2 t}. Rejects t < 0.
SpectralField heat_propagate(const SpectralField& fh, double t);

/// Componentwise spatial derivative d/dx_axis (factor 2 pi i xi_axis).
/// The Nyquist mode's derivative is zeroed (odd symbol convention).
SpectralField derivative(const SpectralField& fh, int axis);

/// curl of a 3-component field: 2 pi i xi x u per mode. Rejects scalar input.
SpectralField curl(const SpectralField& uh);

/// Scalar divergence of a 3-component field.
SpectralField divergence(const SpectralField& uh);

/// Gradient of a scalar field as a 3-component field.
SpectralField gradient_of_scalar(const SpectralField& fh);

/// Inverse Laplacian with zero mean (DC mode mapped to zero).
SpectralField inverse_laplacian(const SpectralField& fh);

/// max_k |div u|(k) normalized by max_k |u|(k); 0 for the zero field.
double relative_divergence(const SpectralField& uh);

/// Riemann-sum L^p norm of the pointwise Euclidean magnitude, cell weight
/// (L/n)^3; p = infinity is the grid max. Rejects p < 1.
double lp_norm(const RealField& f, double p);

/// L^2 norm via Parseval: sqrt(L^3 sum |c_k|^2).
double l2_norm(const SpectralField& fh);
/// L^2 inner product <f,g> = L^3 sum Re(conj(f_k) g_k).
double l2_inner(const SpectralField& a, const SpectralField& b);
/// Squared H^1 seminorm integral |grad f|^2 dx via Parseval.
double dissipation_norm_sq(const SpectralField& fh);

/// Evaluate the trigonometric polynomial at an arbitrary point (exact for
/// band-limited fields; the point is wrapped periodically). Returns one value
/// per component.
Vec3 eval_at(const SpectralField& fh, const Vec3& x);

/// Zero all modes with |k| > fraction * n/2 (radial mask in index space).
void apply_dealias_mask(SpectralField& fh, double fraction);
bool mode_in_dealias_band(const Grid3& g, int i0, int i1, int i2, double fraction);

/// Re-embed coefficients on a grid with `factor`x points per axis (same box).
/// Exact for the represented trigonometric polynomial.
SpectralField zero_pad(const SpectralField& fh, int factor);

/// Largest frequency magnitude |xi| with a nonzero (>|tol|*max) coefficient.
double spectral_radius(const SpectralField& fh, double rel_tol = 0.0);

}  // namespace spectral
}  // namespace cns
