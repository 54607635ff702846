#include "cns/carleman_check.hpp"

#include <algorithm>
#include <cmath>

#include "cns/rng.hpp"

namespace cns {
namespace carleman {

namespace {

struct Kahan {
    double sum = 0.0, comp = 0.0;
    void add(double term) {
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

double grad_hessian_term(const CarlemanWeight& w, double t, const Vec3& x, const Mat3& grad) {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) {
        const Vec3 row{grad(i, 0), grad(i, 1), grad(i, 2)};
        acc += w.hessian_quadratic(t, x, row);
    }
    return acc;
}

}  // namespace

nlohmann::json MonotonicityReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : samples)
        arr.push_back({{"t", s.t},
                       {"lhs_derivative", s.lhs_derivative},
                       {"rhs", s.rhs},
                       {"slack", s.slack},
                       {"scale", s.scale},
                       {"rel_slack", s.rel_slack},
                       {"log_offset", s.log_offset}});
    return {{"samples", arr}, {"min_rel_slack", min_rel_slack}};
}

MonotonicityReport carleman_monotonicity_check(const SpacetimeField& u, const CarlemanWeight& w,
                                               const QuadratureNodes& quad, const std::vector<double>& times,
                                               double fd_step) {
    require(!times.empty(), "carleman_monotonicity_check: no sample times");
    require(fd_step > 0.0, "carleman_monotonicity_check: fd_step must be positive");

    // singular-locus guard: the field must vanish where the weight is not evaluable
    if (w.r_inner > 0.0) {
        double u_max = 0.0;
        for (const auto& p : quad.points) u_max = std::max(u_max, u.value(times.front(), p).norm());
        for (const auto& p : quad.points) {
            if (p.norm() < w.r_inner && u.value(times.front(), p).norm() > 1e-10 * u_max)
                throw ValidationError("carleman_monotonicity_check: support touches the weight's singular locus");
        }
    }

    auto energy_integral = [&](double t, double off) {
        Kahan acc;
        for (size_t q = 0; q < quad.size(); ++q) {
            const Vec3& x = quad.points[q];
            if (w.r_inner > 0.0 && x.norm() < w.r_inner) continue;
            const Vec3 val = u.value(t, x);
            const Mat3 grad = u.gradient(t, x);
            const double integrand = grad.frobenius_sq() + 0.5 * w.F(t, x) * val.norm_sq();
            acc.add(quad.weights[q] * integrand * std::exp(w.g(t, x) - off));
        }
        return acc.sum;
    };
    auto rhs_integral = [&](double t, double off) {
        Kahan acc;
        for (size_t q = 0; q < quad.size(); ++q) {
            const Vec3& x = quad.points[q];
            if (w.r_inner > 0.0 && x.norm() < w.r_inner) continue;
            const Vec3 val = u.value(t, x);
            const Mat3 grad = u.gradient(t, x);
            const Vec3 lu = u.heat_residual(t, x);
            const double integrand = 0.5 * w.LF(t, x) * val.norm_sq() + 2.0 * grad_hessian_term(w, t, x, grad) -
                                     0.5 * lu.norm_sq();
            acc.add(quad.weights[q] * integrand * std::exp(w.g(t, x) - off));
        }
        return acc.sum;
    };

    MonotonicityReport report;
    report.min_rel_slack = std::numeric_limits<double>::infinity();
    for (double t : times) {
        // common log offset over the 5-point stencil
        double off = -std::numeric_limits<double>::infinity();
        for (int s = -2; s <= 2; ++s) {
            const double ts = t + s * fd_step;
            for (size_t q = 0; q < quad.size(); ++q) {
                if (w.r_inner > 0.0 && quad.points[q].norm() < w.r_inner) continue;
                off = std::max(off, w.g(ts, quad.points[q]));
            }
        }
        const double im2 = energy_integral(t - 2.0 * fd_step, off);
        const double im1 = energy_integral(t - fd_step, off);
        const double ip1 = energy_integral(t + fd_step, off);
        const double ip2 = energy_integral(t + 2.0 * fd_step, off);
        const double lhs = (-ip2 + 8.0 * ip1 - 8.0 * im1 + im2) / (12.0 * fd_step);
        const double rhs = rhs_integral(t, off);

        MonotonicitySample sample;
        sample.t = t;
        sample.lhs_derivative = lhs;
        sample.rhs = rhs;
        sample.slack = lhs - rhs;
        sample.scale = std::max(std::abs(lhs), std::abs(rhs));
        sample.rel_slack = sample.scale > 0.0 ? sample.slack / sample.scale : 0.0;
        sample.log_offset = off;
        report.samples.push_back(sample);
        report.min_rel_slack = std::min(report.min_rel_slack, sample.rel_slack);
    }
    return report;
}

namespace {

/// log of int sum w_q f_q e^{e_q} with f_q >= 0, stable offsetting.
struct LogAccumulator {
    double offset = -std::numeric_limits<double>::infinity();
    std::vector<double> terms_log;  // log(w f) + e per term
    void add(double weight_times_f, double exponent) {
        if (weight_times_f <= 0.0) return;
        terms_log.push_back(std::log(weight_times_f) + exponent);
    }
    LogValue value() const {
        LogValue lv;
        if (terms_log.empty()) return lv;
        const double hi = *std::max_element(terms_log.begin(), terms_log.end());
        Kahan acc;
        for (double tl : terms_log) acc.add(std::exp(tl - hi));
        lv.log = hi + std::log(acc.sum);
        return lv;
    }
};

DifferentialInequalityCheck check_lu(const SpacetimeField& u, double C0, double T, double t_begin, double t_end,
                                     const Vec3& center, double r_lo, double r_hi, int samples,
                                     std::uint64_t seed = 7) {
    DifferentialInequalityCheck check;
    CounterRng rng{seed, 0};
    for (int s = 0; s < samples; ++s) {
        const double t = rng.uniform(t_begin, t_end);
        const double r = rng.uniform(r_lo, r_hi);
        const double mu = rng.uniform(-1.0, 1.0);
        const double ph = rng.uniform(0.0, 2.0 * M_PI);
        const double sq = std::sqrt(1.0 - mu * mu);
        const Vec3 x = center + Vec3{r * sq * std::cos(ph), r * sq * std::sin(ph), r * mu};
        const double lu = u.heat_residual(t, x).norm();
        const double rhs = u.value(t, x).norm() / (C0 * T) +
                           std::sqrt(u.gradient(t, x).frobenius_sq() / (C0 * T));
        if (rhs > 0.0) check.max_ratio = std::max(check.max_ratio, lu / rhs);
        ++check.samples;
    }
    return check;
}

}  // namespace

nlohmann::json FirstInequalityReport::to_json() const {
    return {{"X", X.to_json()},
            {"Y", Y.to_json()},
            {"lhs", lhs.to_json()},
            {"bound", bound.to_json()},
            {"slack_linear", std::isfinite(slack_linear) ? nlohmann::json(slack_linear) : nlohmann::json()},
            {"slack_nonnegative", slack_nonnegative},
            {"lu_check", lu_check.to_json()},
            {"params", params}};
}

FirstInequalityReport first_inequality_report(const SpacetimeField& u, const FirstInequalityParams& p,
                                              const QuadratureResolution& res) {
    require(p.C0 > 0.0 && p.T > 0.0, "first_inequality_report: C0 and T must be positive");
    require(p.r_minus > 0.0 && p.r_plus > p.r_minus, "first_inequality_report: need 0 < r- < r+");
    require(p.r_minus * p.r_minus >= 4.0 * p.C0 * p.T,
            "first_inequality_report: constraint r-^2 >= 4 C0 T violated");
    const double csur = p.surrogate_constant > 0.0 ? p.surrogate_constant : p.C0 * p.C0;

    const Vec3 origin{};
    const TimeNodes tn = time_rule(0.0, p.T, res.n_t);
    const QuadratureNodes annulus = shell_rule(origin, p.r_minus, p.r_plus, res.n_r, res.n_polar, res.n_azimuth);

    LogAccumulator accX;
    for (size_t i = 0; i < tn.times.size(); ++i) {
        const double t = tn.times[i];
        for (size_t q = 0; q < annulus.size(); ++q) {
            const Vec3& x = annulus.points[q];
            const double f = u.value(t, x).norm_sq() / p.T + u.gradient(t, x).frobenius_sq();
            accX.add(tn.weights[i] * annulus.weights[q] * f, 2.0 * x.norm_sq() / (p.C0 * p.T));
        }
    }
    const LogValue X = accX.value();

    Kahan accY;
    for (size_t q = 0; q < annulus.size(); ++q)
        accY.add(annulus.weights[q] * u.value(0.0, annulus.points[q]).norm_sq());
    const LogValue Y = LogValue::from_linear(accY.sum);

    LogValue lhs;  // zero when the inner region is empty (r+ < 20 r-)
    if (p.r_plus / 2.0 > 10.0 * p.r_minus) {
        const TimeNodes tq = time_rule(0.0, p.T / 4.0, res.n_t);
        const QuadratureNodes inner = shell_rule(origin, 10.0 * p.r_minus, p.r_plus / 2.0, res.n_r, res.n_polar,
                                                 res.n_azimuth);
        Kahan acc;
        for (size_t i = 0; i < tq.times.size(); ++i)
            for (size_t q = 0; q < inner.size(); ++q) {
                const Vec3& x = inner.points[q];
                const double f = u.value(tq.times[i], x).norm_sq() / p.T + u.gradient(tq.times[i], x).frobenius_sq();
                acc.add(tq.weights[i] * inner.weights[q] * f);
            }
        lhs = LogValue::from_linear(acc.sum);
    }

    const double gain = -p.r_minus * p.r_plus / (4.0 * p.C0 * p.T);
    const LogValue weighted_Y = Y.scaled(2.0 * p.r_plus * p.r_plus / (p.C0 * p.T));
    const LogValue bound = LogValue::sum(X, weighted_Y).scaled(gain + std::log(csur));

    FirstInequalityReport rep;
    rep.X = X;
    rep.Y = Y;
    rep.lhs = lhs;
    rep.bound = bound;
    rep.slack_nonnegative = lhs.is_zero() || bound.log >= lhs.log;
    if (!bound.is_zero() && bound.log < 700.0)
        rep.slack_linear = bound.linear() - (lhs.is_zero() ? 0.0 : lhs.linear());
    else
        rep.slack_linear = std::numeric_limits<double>::infinity();
    rep.lu_check = check_lu(u, p.C0, p.T, 0.0, p.T, origin, p.r_minus, p.r_plus, res.lu_samples);
    rep.params = {{"C0", p.C0},
                  {"T", p.T},
                  {"r_minus", p.r_minus},
                  {"r_plus", p.r_plus},
                  {"surrogate_constant", csur},
                  {"gain_log", gain}};
    return rep;
}

nlohmann::json SecondInequalityReport::to_json() const {
    return {{"X", X.to_json()},
            {"Y", Y.to_json()},
            {"Z", Z.to_json()},
            {"x_term", x_term.to_json()},
            {"y_term", y_term.to_json()},
            {"bound", bound.to_json()},
            {"slack_linear", std::isfinite(slack_linear) ? nlohmann::json(slack_linear) : nlohmann::json()},
            {"slack_nonnegative", slack_nonnegative},
            {"lu_check", lu_check.to_json()},
            {"params", params}};
}

SecondInequalityReport second_inequality_report(const SpacetimeField& u, const SecondInequalityParams& p,
                                                double t0, double t1, const QuadratureResolution& res) {
    require(p.T > 0.0 && p.r > 0.0, "second_inequality_report: T and r must be positive");
    require(p.r * p.r >= 4000.0 * p.T, "second_inequality_report: constraint r^2 >= 4000 T violated");
    require(t1 > 0.0 && t1 <= t0 && t0 < p.T / 1000.0,
            "second_inequality_report: constraint 0 < t1 <= t0 < T/1000 violated");
    require(p.C0 > 0.0, "second_inequality_report: C0 must be positive");

    const Vec3 origin{};
    const QuadratureNodes ball = shell_rule(origin, 0.0, p.r, res.n_r, res.n_polar, res.n_azimuth);
    const QuadratureNodes half_ball = shell_rule(origin, 0.0, p.r / 2.0, res.n_r, res.n_polar, res.n_azimuth);

    const TimeNodes tz = time_rule(t0, 2.0 * t0, res.n_t);
    Kahan accZ;
    for (size_t i = 0; i < tz.times.size(); ++i) {
        const double t = tz.times[i];
        for (size_t q = 0; q < half_ball.size(); ++q) {
            const Vec3& x = half_ball.points[q];
            const double f = u.value(t, x).norm_sq() / p.T + u.gradient(t, x).frobenius_sq();
            accZ.add(tz.weights[i] * half_ball.weights[q] * f * std::exp(-x.norm_sq() / (4.0 * t)));
        }
    }
    const LogValue Z = LogValue::from_linear(accZ.sum);

    const TimeNodes tx = time_rule(0.0, p.T, res.n_t);
    Kahan accX;
    for (size_t i = 0; i < tx.times.size(); ++i)
        for (size_t q = 0; q < ball.size(); ++q) {
            const Vec3& x = ball.points[q];
            const double f = u.value(tx.times[i], x).norm_sq() / p.T + u.gradient(tx.times[i], x).frobenius_sq();
            accX.add(tx.weights[i] * ball.weights[q] * f);
        }
    const LogValue X = LogValue::from_linear(accX.sum);

    Kahan accY;
    for (size_t q = 0; q < ball.size(); ++q) {
        const Vec3& x = ball.points[q];
        accY.add(ball.weights[q] * u.value(0.0, x).norm_sq() * std::pow(t1, -1.5) *
                 std::exp(-x.norm_sq() / (4.0 * t1)));
    }
    const LogValue Y = LogValue::from_linear(accY.sum);

    const double exponent = p.exponent_kappa * p.r * p.r / t0;
    const LogValue x_term = X.scaled(-p.r * p.r / (500.0 * t0));
    const LogValue y_term = Y.scaled(1.5 * std::log(t0) + exponent * std::log(M_E * t0 / t1));
    const LogValue bound = LogValue::sum(x_term, y_term).scaled(std::log(p.surrogate_constant));

    SecondInequalityReport rep;
    rep.X = X;
    rep.Y = Y;
    rep.Z = Z;
    rep.x_term = x_term;
    rep.y_term = y_term;
    rep.bound = bound;
    rep.slack_nonnegative = Z.is_zero() || bound.log >= Z.log;
    if (!bound.is_zero() && bound.log < 700.0)
        rep.slack_linear = bound.linear() - (Z.is_zero() ? 0.0 : Z.linear());
    else
        rep.slack_linear = std::numeric_limits<double>::infinity();
    rep.lu_check = check_lu(u, p.C0, p.T, 0.0, p.T, origin, 0.0, p.r, res.lu_samples);
    rep.params = {{"C0", p.C0},      {"T", p.T},
                  {"r", p.r},        {"t0", t0},
                  {"t1", t1},        {"exponent_kappa", p.exponent_kappa},
                  {"exponent", exponent}, {"surrogate_constant", p.surrogate_constant}};
    return rep;
}

}  // namespace carleman
}  // namespace cns
