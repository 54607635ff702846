#include "cns/quadrature.hpp"

#include <cmath>

#include "cns/errors.hpp"
#include "cns/gauss.hpp"

namespace cns {

QuadratureNodes cube_rule(const Vec3& center, double half_width, int points_per_axis) {
    require(points_per_axis >= 2, "cube_rule: need at least 2 points per axis");
    require(half_width > 0.0, "cube_rule: half_width must be positive");
    const double h = 2.0 * half_width / points_per_axis;
    const double w = h * h * h;
    QuadratureNodes q;
    q.points.reserve(static_cast<size_t>(points_per_axis) * points_per_axis * points_per_axis);
    for (int i = 0; i < points_per_axis; ++i)
        for (int j = 0; j < points_per_axis; ++j)
            for (int k = 0; k < points_per_axis; ++k) {
                q.points.push_back({center[0] - half_width + (i + 0.5) * h,
                                    center[1] - half_width + (j + 0.5) * h,
                                    center[2] - half_width + (k + 0.5) * h});
                q.weights.push_back(w);
            }
    return q;
}

QuadratureNodes shell_rule(const Vec3& center, double r_lo, double r_hi, int n_r, int n_polar, int n_azimuth) {
    require(r_hi > r_lo && r_lo >= 0.0, "shell_rule: need 0 <= r_lo < r_hi");
    require(n_r >= 1 && n_polar >= 1 && n_azimuth >= 1, "shell_rule: node counts must be positive");
    const auto& gr = gauss_legendre(n_r);
    const auto& gp = gauss_legendre(n_polar);
    QuadratureNodes q;
    q.points.reserve(static_cast<size_t>(n_r) * n_polar * n_azimuth);
    const double dphi = 2.0 * M_PI / n_azimuth;
    for (int i = 0; i < n_r; ++i) {
        const double r = gr.node_at(i, r_lo, r_hi);
        const double wr = gr.weight_at(i, r_lo, r_hi) * r * r;
        for (int j = 0; j < n_polar; ++j) {
            const double mu = gp.node_at(j, -1.0, 1.0);
            const double wmu = gp.weight_at(j, -1.0, 1.0);
            const double smu = std::sqrt(std::max(0.0, 1.0 - mu * mu));
            for (int k = 0; k < n_azimuth; ++k) {
                const double phi = (k + 0.5) * dphi;
                q.points.push_back({center[0] + r * smu * std::cos(phi), center[1] + r * smu * std::sin(phi),
                                    center[2] + r * mu});
                q.weights.push_back(wr * wmu * dphi);
            }
        }
    }
    return q;
}

TimeNodes time_rule(double t_begin, double t_end, int n) {
    require(t_end > t_begin, "time_rule: degenerate interval");
    require(n >= 1, "time_rule: need at least one node");
    const auto& g = gauss_legendre(n);
    TimeNodes t;
    for (int i = 0; i < n; ++i) {
        t.times.push_back(g.node_at(i, t_begin, t_end));
        t.weights.push_back(g.weight_at(i, t_begin, t_end));
    }
    return t;
}

}  // namespace cns
