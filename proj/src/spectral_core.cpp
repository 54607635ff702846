#include "cns/spectral_core.hpp"

#include <algorithm>
#include <cmath>

#include "cns/fft.hpp"
#include "cns/parallel.hpp"

namespace cns {

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    require(grid == o.grid && components == o.components, "SpectralField: shape mismatch");
    for (size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += o.coeffs[i];
    return *this;
}
SpectralField& SpectralField::operator-=(const SpectralField& o) {
    require(grid == o.grid && components == o.components, "SpectralField: shape mismatch");
    for (size_t i = 0; i < coeffs.size(); ++i) coeffs[i] -= o.coeffs[i];
    return *this;
}
SpectralField& SpectralField::operator*=(double s) {
    for (auto& c : coeffs) c *= s;
    return *this;
}
SpectralField SpectralField::operator+(const SpectralField& o) const {
    SpectralField r = *this;
    r += o;
    return r;
}
SpectralField SpectralField::operator-(const SpectralField& o) const {
    SpectralField r = *this;
    r -= o;
    return r;
}
SpectralField SpectralField::operator*(double s) const {
    SpectralField r = *this;
    r *= s;
    return r;
}

bool RealField::all_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

namespace spectral {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

/// 2 pi xi_axis with the Nyquist derivative zeroed.
inline double deriv_freq(const Grid3& g, int i) {
    if (i == g.n / 2) return 0.0;
    return kTwoPi * g.signed_index(i) / g.L;
}
}  // namespace

SpectralField forward_transform_unchecked(const RealField& f) {
    const int n = f.grid.n;
    SpectralField out(f.grid, f.components);
    const double scale = 1.0 / static_cast<double>(f.points());
    parallel_for(f.components, [&](int c) {
        Complex* dst = out.component(c);
        const double* src = f.component(c);
        for (std::int64_t i = 0; i < f.points(); ++i) dst[i] = src[i];
        fft::forward_3d(dst, n);
        for (std::int64_t i = 0; i < f.points(); ++i) dst[i] *= scale;
    });
    return out;
}

SpectralField forward_transform(const RealField& f) {
    require(f.all_finite(), "forward_transform: non-finite sample in input");
    return forward_transform_unchecked(f);
}

double hermitian_asymmetry(const SpectralField& fh) {
    const int n = fh.grid.n;
    double worst = 0.0;
    for (int c = 0; c < fh.components; ++c) {
        for (int i0 = 0; i0 < n; ++i0) {
            const int j0 = fh.grid.conjugate_index(i0);
            for (int i1 = 0; i1 < n; ++i1) {
                const int j1 = fh.grid.conjugate_index(i1);
                for (int i2 = 0; i2 < n; ++i2) {
                    const int j2 = fh.grid.conjugate_index(i2);
                    const Complex d = fh.at(c, j0, j1, j2) - std::conj(fh.at(c, i0, i1, i2));
                    worst = std::max(worst, std::abs(d));
                }
            }
        }
    }
    return worst;
}

void hermitian_symmetrize(SpectralField& fh) {
    const int n = fh.grid.n;
    for (int c = 0; c < fh.components; ++c) {
        for (int i0 = 0; i0 < n; ++i0) {
            const int j0 = fh.grid.conjugate_index(i0);
            for (int i1 = 0; i1 < n; ++i1) {
                const int j1 = fh.grid.conjugate_index(i1);
                for (int i2 = 0; i2 < n; ++i2) {
                    const int j2 = fh.grid.conjugate_index(i2);
                    const std::int64_t a = fh.flat(c, i0, i1, i2);
                    const std::int64_t b = fh.flat(c, j0, j1, j2);
                    if (a > b) continue;
                    const Complex avg = 0.5 * (fh.coeffs[a] + std::conj(fh.coeffs[b]));
                    fh.coeffs[a] = avg;
                    fh.coeffs[b] = std::conj(avg);
                }
            }
        }
    }
}

double max_abs_coeff(const SpectralField& fh) {
    double m = 0.0;
    for (const auto& c : fh.coeffs) m = std::max(m, std::abs(c));
    return m;
}

RealField inverse_transform_unchecked(const SpectralField& fh) {
    const int n = fh.grid.n;
    RealField out(fh.grid, fh.components);
    parallel_for(fh.components, [&](int c) {
        std::vector<Complex> buf(fh.component(c), fh.component(c) + fh.modes());
        fft::backward_3d(buf.data(), n);
        double* dst = out.component(c);
        for (std::int64_t i = 0; i < fh.modes(); ++i) dst[i] = buf[i].real();
    });
    return out;
}

RealField inverse_transform(const SpectralField& fh, double hermitian_tol) {
    const double scale = max_abs_coeff(fh);
    if (scale > 0.0) {
        const double asym = hermitian_asymmetry(fh);
        require(asym <= hermitian_tol * scale,
                "inverse_transform: broken Hermitian symmetry (rel asymmetry " + std::to_string(asym / scale) + ")");
    }
    return inverse_transform_unchecked(fh);
}

SpectralField leray_project(const SpectralField& uh) {
    require(uh.components == 3, "leray_project: 3-component field required");
    const int n = uh.grid.n;
    SpectralField out = uh;
    for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
                const Vec3 xi = uh.grid.frequency(i0, i1, i2);
                const double s = xi.norm_sq();
                if (s == 0.0) continue;
                Complex dot = 0.0;
                for (int c = 0; c < 3; ++c) dot += xi[c] * out.at(c, i0, i1, i2);
                dot /= s;
                for (int c = 0; c < 3; ++c) out.at(c, i0, i1, i2) -= xi[c] * dot;
            }
    return out;
}

SpectralField heat_propagate(const SpectralField& fh, double t) {
    require(t >= 0.0, "heat_propagate: t must be nonnegative");
    const int n = fh.grid.n;
    SpectralField out = fh;
    for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
                const Vec3 xi = fh.grid.frequency(i0, i1, i2);
                const double factor = std::exp(-kTwoPi * kTwoPi * xi.norm_sq() * t);
                for (int c = 0; c < fh.components; ++c) out.at(c, i0, i1, i2) *= factor;
            }
    return out;
}

SpectralField derivative(const SpectralField& fh, int axis) {
    require(axis >= 0 && axis < 3, "derivative: axis out of range");
    const int n = fh.grid.n;
    SpectralField out = fh;
    for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
                const int idx[3] = {i0, i1, i2};
                const Complex factor(0.0, deriv_freq(fh.grid, idx[axis]));
                for (int c = 0; c < fh.components; ++c) out.at(c, i0, i1, i2) *= factor;
            }
    return out;
}

SpectralField curl(const SpectralField& uh) {
    require(uh.components == 3, "curl: 3-component field required");
    const int n = uh.grid.n;
    SpectralField out(uh.grid, 3);
    for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
                const double k0 = deriv_freq(uh.grid, i0);
                const double k1 = deriv_freq(uh.grid, i1);
                const double k2 = deriv_freq(uh.grid, i2);
                const Complex u0 = uh.at(0, i0, i1, i2);
                const Complex u1 = uh.at(1, i0, i1, i2);
                const Complex u2 = uh.at(2, i0, i1, i2);
                const Complex I(0.0, 1.0);
                out.at(0, i0, i1, i2) = I * (k1 * u2 - k2 * u1);
                out.at(1, i0, i1, i2) = I * (k2 * u0 - k0 * u2);
                out.at(2, i0, i1, i2) = I * (k0 * u1 - k1 * u0);
            }
    return out;
}

SpectralField divergence(const SpectralField& uh) {
    require(uh.components == 3, "divergence: 3-component field required");
    const int n = uh.grid.n;
    SpectralField out(uh.grid, 1);
    for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
                const Complex I(0.0, 1.0);
                out.at(0, i0, i1, i2) = I * (deriv_freq(uh.grid, i0) * uh.at(0, i0, i1, i2) +
                                             deriv_freq(uh.grid, i1) * uh.at(1, i0, i1, i2) +
                                             deriv_freq(uh.grid, i2) * uh.at(2, i0, i1, i2));
            }
    return out;
}

SpectralField gradient_of_scalar(const SpectralField& fh) {
    require(fh.components == 1, "gradient_of_scalar: scalar field required");
    const int n = fh.grid.n;
    SpectralField out(fh.grid, 3);
    for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
                const Complex I(0.0, 1.0);
                const Complex f = fh.at(0, i0, i1, i2);
                out.at(0, i0, i1, i2) = I * deriv_freq(fh.grid, i0) * f;
                out.at(1, i0, i1, i2) = I * deriv_freq(fh.grid, i1) * f;
                out.at(2, i0, i1, i2) = I * deriv_freq(fh.grid, i2) * f;
            }
    return out;
}

SpectralField inverse_laplacian(const SpectralField& fh) {
    const int n = fh.grid.n;
    SpectralField out = fh;
    for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
                const Vec3 xi = fh.grid.frequency(i0, i1, i2);
                const double s = kTwoPi * kTwoPi * xi.norm_sq();
                for (int c = 0; c < fh.components; ++c) {
                    if (s == 0.0)
                        out.at(c, i0, i1, i2) = 0.0;
                    else
                        out.at(c, i0, i1, i2) /= -s;
                }
            }
    return out;
}

double relative_divergence(const SpectralField& uh) {
    const double scale = max_abs_coeff(uh);
    if (scale == 0.0) return 0.0;
    return max_abs_coeff(divergence(uh)) / (kTwoPi * uh.grid.nyquist() * scale);
}

double lp_norm(const RealField& f, double p) {
    require(p >= 1.0, "lp_norm: p must be >= 1 (or infinity)");
    const std::int64_t npts = f.points();
    if (std::isinf(p)) {
        double m = 0.0;
        for (std::int64_t i = 0; i < npts; ++i) m = std::max(m, f.magnitude(i));
        return m;
    }
    double acc = 0.0, comp = 0.0;  // Kahan
    for (std::int64_t i = 0; i < npts; ++i) {
        const double term = std::pow(f.magnitude(i), p);
        const double y = term - comp;
        const double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    return std::pow(acc * f.grid.cell_volume(), 1.0 / p);
}

double l2_norm(const SpectralField& fh) {
    double acc = 0.0;
    for (const auto& c : fh.coeffs) acc += std::norm(c);
    return std::sqrt(acc * fh.grid.volume());
}

double l2_inner(const SpectralField& a, const SpectralField& b) {
    require(a.grid == b.grid && a.components == b.components, "l2_inner: shape mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < a.coeffs.size(); ++i) acc += (std::conj(a.coeffs[i]) * b.coeffs[i]).real();
    return acc * a.grid.volume();
}

double dissipation_norm_sq(const SpectralField& fh) {
    const int n = fh.grid.n;
    double acc = 0.0;
    for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
                const Vec3 xi = fh.grid.frequency(i0, i1, i2);
                const double w = kTwoPi * kTwoPi * xi.norm_sq();
                for (int c = 0; c < fh.components; ++c) acc += w * std::norm(fh.at(c, i0, i1, i2));
            }
    return acc * fh.grid.volume();
}

Vec3 eval_at(const SpectralField& fh, const Vec3& x) {
    const int n = fh.grid.n;
    const double L = fh.grid.L;
    // Per-axis phase tables e^{2 pi i k x_a / L}.
    std::vector<Complex> e0(n), e1(n), e2(n);
    for (int i = 0; i < n; ++i) {
        const double k = fh.grid.signed_index(i);
        e0[i] = std::polar(1.0, kTwoPi * k * x[0] / L);
        e1[i] = std::polar(1.0, kTwoPi * k * x[1] / L);
        e2[i] = std::polar(1.0, kTwoPi * k * x[2] / L);
    }
    Vec3 out;
    for (int c = 0; c < fh.components; ++c) {
        Complex total = 0.0;
        const Complex* base = fh.component(c);
        for (int i0 = 0; i0 < n; ++i0) {
            Complex s0 = 0.0;
            for (int i1 = 0; i1 < n; ++i1) {
                Complex s1 = 0.0;
                const Complex* row = base + (static_cast<std::int64_t>(i0) * n + i1) * n;
                for (int i2 = 0; i2 < n; ++i2) s1 += row[i2] * e2[i2];
                s0 += s1 * e1[i1];
            }
            total += s0 * e0[i0];
        }
        out[c] = total.real();
    }
    return out;
}

bool mode_in_dealias_band(const Grid3& g, int i0, int i1, int i2, double fraction) {
    const double k0 = g.signed_index(i0);
    const double k1 = g.signed_index(i1);
    const double k2 = g.signed_index(i2);
    const double cut = fraction * g.n / 2.0;
    return k0 * k0 + k1 * k1 + k2 * k2 <= cut * cut * (1.0 + 1e-12);
}

void apply_dealias_mask(SpectralField& fh, double fraction) {
    const int n = fh.grid.n;
    for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
                if (mode_in_dealias_band(fh.grid, i0, i1, i2, fraction)) continue;
                for (int c = 0; c < fh.components; ++c) fh.at(c, i0, i1, i2) = 0.0;
            }
}

SpectralField zero_pad(const SpectralField& fh, int factor) {
    require(factor >= 1, "zero_pad: factor must be >= 1");
    if (factor == 1) return fh;
    const int n = fh.grid.n;
    const Grid3 big(n * factor, fh.grid.L);
    SpectralField out(big, fh.components);
    for (int c = 0; c < fh.components; ++c)
        for (int i0 = 0; i0 < n; ++i0) {
            const int k0 = fh.grid.signed_index(i0);
            const int j0 = k0 >= 0 ? k0 : k0 + big.n;
            for (int i1 = 0; i1 < n; ++i1) {
                const int k1 = fh.grid.signed_index(i1);
                const int j1 = k1 >= 0 ? k1 : k1 + big.n;
                for (int i2 = 0; i2 < n; ++i2) {
                    const int k2 = fh.grid.signed_index(i2);
                    const int j2 = k2 >= 0 ? k2 : k2 + big.n;
                    out.at(c, j0, j1, j2) = fh.at(c, i0, i1, i2);
                }
            }
        }
    return out;
}

double spectral_radius(const SpectralField& fh, double rel_tol) {
    const double scale = max_abs_coeff(fh);
    if (scale == 0.0) return 0.0;
    const int n = fh.grid.n;
    double r = 0.0;
    for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
                double amp = 0.0;
                for (int c = 0; c < fh.components; ++c) amp = std::max(amp, std::abs(fh.at(c, i0, i1, i2)));
                if (amp > rel_tol * scale) r = std::max(r, fh.grid.frequency(i0, i1, i2).norm());
            }
    return r;
}

}  // namespace spectral
}  // namespace cns
