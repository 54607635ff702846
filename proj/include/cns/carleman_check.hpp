#pragma once

#include <json.hpp>

#include "cns/carleman_weight.hpp"
#include "cns/quadrature.hpp"
#include "cns/spacetime_field.hpp"

namespace cns {
namespace carleman {

/// Value tracked in the log domain; exponential weights overflow otherwise.
struct LogValue {
    double log = -std::numeric_limits<double>::infinity();

    static LogValue from_linear(double v) {
        LogValue lv;
        if (v > 0.0) lv.log = std::log(v);
        return lv;
    }
    double linear() const { return std::exp(log); }
    bool is_zero() const { return std::isinf(log) && log < 0.0; }
    LogValue scaled(double log_factor) const {
        LogValue lv = *this;
        if (!lv.is_zero()) lv.log += log_factor;
        return lv;
    }
    static LogValue sum(const LogValue& a, const LogValue& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        const double hi = std::max(a.log, b.log);
        LogValue lv;
        lv.log = hi + std::log(std::exp(a.log - hi) + std::exp(b.log - hi));
        return lv;
    }
    nlohmann::json to_json() const {
        nlohmann::json j;
        if (is_zero())
            j["linear"] = 0.0;
        else if (log < 700.0)
            j["linear"] = linear();
        else
            j["linear"] = nullptr;  // not representable in linear scale
        if (std::isfinite(log))
            j["log"] = log;
        else
            j["log"] = nullptr;
        return j;
    }
};

struct MonotonicitySample {
    double t = 0.0;
    double lhs_derivative = 0.0;  // scaled by e^{-log_offset}
    double rhs = 0.0;
    double slack = 0.0;
    double scale = 0.0;
    double rel_slack = 0.0;
    double log_offset = 0.0;
};

struct MonotonicityReport {
    std::vector<MonotonicitySample> samples;
    double min_rel_slack = 0.0;
    nlohmann::json to_json() const;
};

/// Per-time slack of the general Carleman inequality
///   d_t int (|grad u|^2 + F|u|^2/2) e^g  >=  int (LF |u|^2/2 + 2 D^2g(grad u, grad u) - |Lu|^2/2) e^g,
/// the left derivative taken by a 5-point stencil of half-width fd_step.
/// Rejects quadrature nodes that touch the weight's singular locus with
/// non-negligible field values.
MonotonicityReport carleman_monotonicity_check(const SpacetimeField& u, const CarlemanWeight& w,
                                               const QuadratureNodes& quad, const std::vector<double>& times,
                                               double fd_step);

struct QuadratureResolution {
    int n_r = 24;
    int n_polar = 10;
    int n_azimuth = 20;
    int n_t = 10;
    int lu_samples = 64;
};

struct DifferentialInequalityCheck {
    double max_ratio = 0.0;  // |Lu| / (C0^{-1} T^{-1} |u| + C0^{-1/2} T^{-1/2} |grad u|)
    int samples = 0;
    nlohmann::json to_json() const { return {{"max_ratio", max_ratio}, {"samples", samples}}; }
};

struct FirstInequalityParams {
    double C0 = 0.0;
    double T = 0.0;
    double r_minus = 0.0;
    double r_plus = 0.0;
    double surrogate_constant = 0.0;  // 0 selects C0^2
};

struct FirstInequalityReport {
    LogValue X, Y, lhs, bound;
    double slack_linear = 0.0;     // bound - lhs when both finite in linear scale
    bool slack_nonnegative = false;
    DifferentialInequalityCheck lu_check;
    nlohmann::json params;
    nlohmann::json to_json() const;
};

/// Prop-style first Carleman report over the cylindrical annulus
/// [0,T] x {r- <= |x| <= r+}:
///   X = int e^{2|x|^2/C0T} (T^{-1}|u|^2 + |grad u|^2),  Y = int |u(0)|^2,
///   lhs over [0,T/4] x {10 r- <= |x| <= r+/2},
///   bound = Csur e^{-r- r+/4C0T} (X + e^{2 r+^2/C0T} Y).
FirstInequalityReport first_inequality_report(const SpacetimeField& u, const FirstInequalityParams& params,
                                              const QuadratureResolution& res = {});

struct SecondInequalityParams {
    double C0 = 0.0;   // used by the differential inequality check
    double T = 0.0;
    double r = 0.0;
    double exponent_kappa = 4.0;      // surrogate for the O(r^2/t0) exponent
    double surrogate_constant = 1.0;
};

struct SecondInequalityReport {
    LogValue X, Y, Z, bound, x_term, y_term;
    double slack_linear = 0.0;
    bool slack_nonnegative = false;
    DifferentialInequalityCheck lu_check;
    nlohmann::json params;
    nlohmann::json to_json() const;
};

/// Prop-style second Carleman report over the cylinder [0,T] x {|x| <= r}:
///   Z = int_{t0}^{2t0} int_{|x|<=r/2} (T^{-1}|u|^2+|grad u|^2) e^{-|x|^2/4t},
///   X = int_0^T int_{|x|<=r} (T^{-1}|u|^2+|grad u|^2),
///   Y = int |u(0)|^2 t1^{-3/2} e^{-|x|^2/4t1},
///   bound = Csur (e^{-r^2/500 t0} X + t0^{3/2} (e t0/t1)^{kappa r^2/t0} Y).
/// Requires r^2 >= 4000 T and 0 < t1 <= t0 < T/1000.
SecondInequalityReport second_inequality_report(const SpacetimeField& u, const SecondInequalityParams& params,
                                                double t0, double t1, const QuadratureResolution& res = {});

}  // namespace carleman
}  // namespace cns
