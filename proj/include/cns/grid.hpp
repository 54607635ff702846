#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "cns/errors.hpp"

namespace cns {

struct Vec3 {
    double v[3] = {0.0, 0.0, 0.0};

    double& operator[](int i) { return v[i]; }
    double operator[](int i) const { return v[i]; }

    Vec3 operator+(const Vec3& o) const { return {v[0] + o.v[0], v[1] + o.v[1], v[2] + o.v[2]}; }
    Vec3 operator-(const Vec3& o) const { return {v[0] - o.v[0], v[1] - o.v[1], v[2] - o.v[2]}; }
    Vec3 operator*(double s) const { return {v[0] * s, v[1] * s, v[2] * s}; }
    double dot(const Vec3& o) const { return v[0] * o.v[0] + v[1] * o.v[1] + v[2] * o.v[2]; }
    double norm_sq() const { return dot(*this); }
    double norm() const { return std::sqrt(norm_sq()); }
    Vec3 cross(const Vec3& o) const {
        return {v[1] * o.v[2] - v[2] * o.v[1], v[2] * o.v[0] - v[0] * o.v[2], v[0] * o.v[1] - v[1] * o.v[0]};
    }
};

inline Vec3 operator*(double s, const Vec3& a) { return a * s; }

/// 3x3 real matrix, row-major; rows index the field component, columns the derivative axis.
struct Mat3 {
    double m[3][3] = {};
    double& operator()(int i, int j) { return m[i][j]; }
    double operator()(int i, int j) const { return m[i][j]; }
    double frobenius_sq() const {
        double s = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) s += m[i][j] * m[i][j];
        return s;
    }
};

/// Uniform periodic box [0,L)^3 sampled with n points per axis, n a power of two.
/// Fourier modes carry integer index k per axis in (-n/2, n/2]; the physical
/// frequency of a mode is xi = k/L, so the field is f(x) = sum_k c_k e^{2 pi i k.x/L}.
struct Grid3 {
    int n = 0;
    double L = 0.0;

    Grid3() = default;
    Grid3(int n_, double L_) : n(n_), L(L_) {
        require(n >= 8, "Grid3: n must be >= 8");
        require((n & (n - 1)) == 0, "Grid3: n must be a power of two");
        require(L > 0.0, "Grid3: L must be positive");
    }

    std::int64_t size() const { return static_cast<std::int64_t>(n) * n * n; }
    double spacing() const { return L / n; }
    /// Largest representable frequency magnitude per axis, n/(2L).
    double nyquist() const { return n / (2.0 * L); }

    /// Signed integer mode index for storage index i in [0,n).
    int signed_index(int i) const { return i <= n / 2 ? i : i - n; }
    /// Storage index of the conjugate mode -k.
    int conjugate_index(int i) const { return i == 0 ? 0 : n - i; }

    Vec3 frequency(int i0, int i1, int i2) const {
        return {signed_index(i0) / L, signed_index(i1) / L, signed_index(i2) / L};
    }

    Vec3 point(int i0, int i1, int i2) const {
        const double h = spacing();
        return {i0 * h, i1 * h, i2 * h};
    }

    double cell_volume() const { return spacing() * spacing() * spacing(); }
    double volume() const { return L * L * L; }

    /// Minimal-image displacement a-b on the torus, components in [-L/2, L/2).
    Vec3 periodic_delta(const Vec3& a, const Vec3& b) const {
        Vec3 d = a - b;
        for (int i = 0; i < 3; ++i) {
            d[i] -= L * std::floor(d[i] / L + 0.5);
        }
        return d;
    }
    double periodic_distance(const Vec3& a, const Vec3& b) const { return periodic_delta(a, b).norm(); }

    bool operator==(const Grid3& o) const { return n == o.n && L == o.L; }
    bool operator!=(const Grid3& o) const { return !(*this == o); }
};

}  // namespace cns
