#pragma once

#include <vector>

#include "cns/grid.hpp"

namespace cns {

struct QuadratureNodes {
    std::vector<Vec3> points;
    std::vector<double> weights;
    size_t size() const { return points.size(); }
};

/// Midpoint rule over the cube [center - hw, center + hw]^3.
QuadratureNodes cube_rule(const Vec3& center, double half_width, int points_per_axis);

/// Spherical shell r_lo <= |x - center| <= r_hi: Gauss-Legendre in radius and
/// polar cosine, uniform in azimuth. Exact volume weights; r_lo = 0 gives a ball.
QuadratureNodes shell_rule(const Vec3& center, double r_lo, double r_hi, int n_r, int n_polar, int n_azimuth);

/// Gauss-Legendre nodes/weights on a time interval.
struct TimeNodes {
    std::vector<double> times;
    std::vector<double> weights;
};
TimeNodes time_rule(double t_begin, double t_end, int n);

}  // namespace cns
