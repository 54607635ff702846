#pragma once

#include <complex>
#include <vector>

#include "cns/grid.hpp"

namespace cns {

using Complex = std::complex<double>;

/// Fourier-side field: one complex amplitude per mode per component.
/// Layout is component-major, then (k0,k1,k2) row-major with k2 fastest,
/// storage indices in FFT order (0..n-1 wrapping to signed modes).
struct SpectralField {
    Grid3 grid;
    int components = 1;
    std::vector<Complex> coeffs;

    SpectralField() = default;
    SpectralField(const Grid3& g, int comps) : grid(g), components(comps), coeffs(static_cast<size_t>(comps) * g.size()) {
        require(comps == 1 || comps == 3, "SpectralField: components must be 1 or 3");
    }

    std::int64_t modes() const { return grid.size(); }
    std::int64_t flat(int c, int i0, int i1, int i2) const {
        return ((static_cast<std::int64_t>(c) * grid.n + i0) * grid.n + i1) * grid.n + i2;
    }
    Complex& at(int c, int i0, int i1, int i2) { return coeffs[flat(c, i0, i1, i2)]; }
    const Complex& at(int c, int i0, int i1, int i2) const { return coeffs[flat(c, i0, i1, i2)]; }

    Complex* component(int c) { return coeffs.data() + static_cast<std::int64_t>(c) * modes(); }
    const Complex* component(int c) const { return coeffs.data() + static_cast<std::int64_t>(c) * modes(); }

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double s);
    SpectralField operator+(const SpectralField& o) const;
    SpectralField operator-(const SpectralField& o) const;
    SpectralField operator*(double s) const;
};

/// Physical-side field: one real sample per grid point per component, same layout.
struct RealField {
    Grid3 grid;
    int components = 1;
    std::vector<double> values;

    RealField() = default;
    RealField(const Grid3& g, int comps) : grid(g), components(comps), values(static_cast<size_t>(comps) * g.size()) {
        require(comps == 1 || comps == 3, "RealField: components must be 1 or 3");
    }

    std::int64_t points() const { return grid.size(); }
    std::int64_t flat(int c, int i0, int i1, int i2) const {
        return ((static_cast<std::int64_t>(c) * grid.n + i0) * grid.n + i1) * grid.n + i2;
    }
    double& at(int c, int i0, int i1, int i2) { return values[flat(c, i0, i1, i2)]; }
    double at(int c, int i0, int i1, int i2) const { return values[flat(c, i0, i1, i2)]; }

    double* component(int c) { return values.data() + static_cast<std::int64_t>(c) * points(); }
    const double* component(int c) const { return values.data() + static_cast<std::int64_t>(c) * points(); }

    /// Euclidean magnitude over components at one grid point.
    double magnitude(std::int64_t point_index) const {
        double s = 0;
        for (int c = 0; c < components; ++c) {
            const double x = values[static_cast<std::int64_t>(c) * points() + point_index];
            s += x * x;
        }
        return std::sqrt(s);
    }

    bool all_finite() const;
};

}  // namespace cns
