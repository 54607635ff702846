#pragma once

#include <functional>

#include <json.hpp>

#include "cns/grid.hpp"

namespace cns {
namespace carleman {

/// A spacetime weight g with analytic gradient, directional Hessian, and the
/// closed forms F = d_t g - Lap g - |grad g|^2 and LF = (d_t + Lap) F.
struct CarlemanWeight {
    std::function<double(double, const Vec3&)> g;
    std::function<Vec3(double, const Vec3&)> grad_g;
    /// D^2 g(v, v)
    std::function<double(double, const Vec3&, const Vec3&)> hessian_quadratic;
    std::function<double(double, const Vec3&)> F;
    std::function<double(double, const Vec3&)> LF;
    nlohmann::json params;
    // admissible sampling domain: r_inner <= |x| <= r_outer, 0 <= t <= t_max
    double r_inner = 0.0;
    double r_outer = 0.0;
    double t_max = 0.0;
    // distance from t = 0 to the weight's time singularity (0 if none);
    // finite-difference checks scale their step with t + this offset
    double time_singularity_offset = 0.0;
};

/// Choice for the drift rate alpha of the first weight. The printed form
/// r+/(2 C0 T^2) is algebraically consistent with the stated gain
/// e^{-r- r+/4 C0 T}; the alternative r+/(2 C0 T) is kept selectable.
enum class AlphaVariant { PaperT2, LinearT };

struct WeightFirstParams {
    double C0 = 0.0;
    double T = 0.0;
    double T0 = 0.0;  // pigeonhole time in [T/2, T]
    double r_minus = 0.0;
    double r_plus = 0.0;
    AlphaVariant variant = AlphaVariant::PaperT2;
    double alpha_override = -1.0;  // >= 0 replaces the derived drift rate (degenerate checks)

    double alpha() const {
        if (alpha_override >= 0.0) return alpha_override;
        return variant == AlphaVariant::PaperT2 ? r_plus / (2.0 * C0 * T * T) : r_plus / (2.0 * C0 * T);
    }
};

/// g = alpha (T0 - t) |x| + |x|^2/(C0 T) on the annulus r- <= |x| <= r+.
/// Requires r-^2 >= 4 C0 T.
CarlemanWeight weight_first(const WeightFirstParams& params);

struct WeightSecondParams {
    double alpha = 0.0;
    double T = 0.0;   // slab length (for the r^2 >= 4000 T constraint)
    double T0 = 0.0;
    double t1 = 0.0;
    double r = 0.0;
};

/// g = -|x|^2/4(t+t1) - (3/2) log(t+t1) - alpha log((t+t1)/(T0+t1)) + alpha (t+t1)/(T0+t1).
/// Requires r^2 >= 4000 T and T0, t1 > 0.
CarlemanWeight weight_second(const WeightSecondParams& params);

/// Cross-check of the closed forms against finite differences of g (for F)
/// and of F (for LF) at deterministic sample points in the admissible domain.
struct WeightCheck {
    double max_rel_err_F = 0.0;
    double max_rel_err_LF = 0.0;
    int samples = 0;
    bool f_sign_ok = true;  // F < 0 (first weight) / F <= 0 for t <= T0 (second)
};

WeightCheck weight_consistency_check(const CarlemanWeight& w, int n_points, std::uint64_t seed,
                                     bool expect_nonpositive_F = true);

}  // namespace carleman
}  // namespace cns
