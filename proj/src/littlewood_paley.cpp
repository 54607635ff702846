#include "cns/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>

#include "cns/gauss.hpp"

namespace cns {
namespace lp {

namespace {

double mollifier(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return std::exp(-1.0 / (s * (1.0 - s)));
}

// integral of the mollifier over [0,u], composite GL with fixed panels
double mollifier_mass(double u) {
    if (u <= 0.0) return 0.0;
    u = std::min(u, 1.0);
    const auto& gl = gauss_legendre(20);
    constexpr int panels = 8;
    const double h = u / panels;
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = p * h;
        for (int i = 0; i < gl.order(); ++i) acc += gl.weight_at(i, a, a + h) * mollifier(gl.node_at(i, a, a + h));
    }
    return acc;
}

}  // namespace

BumpProfile::BumpProfile() : transition_mass_(mollifier_mass(1.0)) {}

double BumpProfile::operator()(double r) const {
    if (r <= 0.5) return 1.0;
    if (r >= 1.0) return 0.0;
    const double u = 2.0 * r - 1.0;
    return 1.0 - mollifier_mass(u) / transition_mass_;
}

LPProjector::LPProjector(const Grid3& grid, BumpProfile profile) : grid_(grid), profile_(std::move(profile)) {}

const std::vector<double>& LPProjector::symbol_leq(double N) const {
    require(N > 0.0, "LPProjector: frequency parameter N must be positive");
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(N);
    if (it != cache_.end()) return it->second;

    const int n = grid_.n;
    std::vector<double> sym(static_cast<size_t>(grid_.size()));
    std::int64_t idx = 0;
    for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) sym[idx++] = profile_(grid_.frequency(i0, i1, i2).norm() / N);
    return cache_.emplace(N, std::move(sym)).first->second;
}

namespace {
SpectralField apply_symbol(const SpectralField& fh, const std::vector<double>& sym) {
    SpectralField out = fh;
    const std::int64_t m = fh.modes();
    for (int c = 0; c < fh.components; ++c) {
        Complex* dst = out.component(c);
        for (std::int64_t i = 0; i < m; ++i) dst[i] *= sym[i];
    }
    return out;
}
SpectralField apply_symbol_diff(const SpectralField& fh, const std::vector<double>& hi, const std::vector<double>& lo) {
    SpectralField out = fh;
    const std::int64_t m = fh.modes();
    for (int c = 0; c < fh.components; ++c) {
        Complex* dst = out.component(c);
        for (std::int64_t i = 0; i < m; ++i) dst[i] *= (hi[i] - lo[i]);
    }
    return out;
}
}  // namespace

SpectralField LPProjector::project_leq(const SpectralField& fh, double N) const {
    require(fh.grid == grid_, "LPProjector: grid mismatch");
    return apply_symbol(fh, symbol_leq(N));
}

SpectralField LPProjector::project_band(const SpectralField& fh, double N) const {
    require(fh.grid == grid_, "LPProjector: grid mismatch");
    return apply_symbol_diff(fh, symbol_leq(N), symbol_leq(N / 2.0));
}

SpectralField LPProjector::project_tilde(const SpectralField& fh, double N) const {
    require(fh.grid == grid_, "LPProjector: grid mismatch");
    return apply_symbol_diff(fh, symbol_leq(2.0 * N), symbol_leq(N / 4.0));
}

SpectralField LPProjector::project_gt(const SpectralField& fh, double N) const {
    require(fh.grid == grid_, "LPProjector: grid mismatch");
    const auto& sym = symbol_leq(N);
    SpectralField out = fh;
    const std::int64_t m = fh.modes();
    for (int c = 0; c < fh.components; ++c) {
        Complex* dst = out.component(c);
        for (std::int64_t i = 0; i < m; ++i) dst[i] *= (1.0 - sym[i]);
    }
    return out;
}

std::vector<double> dyadic_ladder(const Grid3& grid) {
    std::vector<double> ladder;
    const double top = 2.0 * grid.nyquist();
    for (double N = 1.0 / grid.L; N <= top * (1.0 + 1e-12); N *= 2.0) ladder.push_back(N);
    return ladder;
}

bool on_dyadic_ladder(const Grid3& grid, double N, double rel_tol) {
    if (N <= 0.0) return false;
    const double k = std::log2(N * grid.L);
    return std::abs(k - std::round(k)) <= rel_tol;
}

SpectralField apply_multiplier(const MultiplierSymbol& sym, const SpectralField& fh) {
    const int n = fh.grid.n;
    SpectralField out = fh;
    for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
                const Vec3 xi = fh.grid.frequency(i0, i1, i2);
                const Complex v = sym.m(xi);
                require(std::isfinite(v.real()) && std::isfinite(v.imag()),
                        "apply_multiplier: symbol not finite on the grid spectrum");
                for (int c = 0; c < fh.components; ++c) out.at(c, i0, i1, i2) *= v;
            }
    return out;
}

nlohmann::json SweepReport::to_json() const {
    return {{"inequality_id", inequality_id},
            {"parameters", parameters},
            {"per_sample_ratios", per_sample_ratios},
            {"max_ratio", max_ratio},
            {"sweep_spread", sweep_spread}};
}

namespace {
void finalize_ratios(SweepReport& rep) {
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (double r : rep.per_sample_ratios) {
        if (r <= 0.0) continue;
        if (!any) {
            lo = hi = r;
            any = true;
        } else {
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
    }
    rep.max_ratio = hi;
    rep.sweep_spread = any && lo > 0.0 ? hi / lo : 0.0;
}

double restricted_lp_norm(const RealField& f, double p, const BallRegion* region, double pad,
                          std::int64_t* count_out = nullptr) {
    const int n = f.grid.n;
    double acc = 0.0, mx = 0.0;
    std::int64_t count = 0;
    std::int64_t idx = 0;
    for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2, ++idx) {
                if (region) {
                    const Vec3 x = f.grid.point(i0, i1, i2);
                    if (f.grid.periodic_distance(x, region->center) > region->radius + pad) continue;
                }
                ++count;
                const double mag = f.magnitude(idx);
                if (std::isinf(p))
                    mx = std::max(mx, mag);
                else
                    acc += std::pow(mag, p);
            }
    if (count_out) *count_out = count;
    if (std::isinf(p)) return mx;
    return std::pow(acc * f.grid.cell_volume(), 1.0 / p);
}
}  // namespace

SweepReport multiplier_bound_report(const MultiplierSymbol& sym, double p, double q,
                                    const std::vector<SpectralField>& samples) {
    require(p >= 1.0 && (std::isinf(q) || q >= p), "multiplier_bound_report: need 1 <= p <= q");
    require(!std::isinf(p) || std::isinf(q), "multiplier_bound_report: need p <= q");
    SweepReport rep;
    rep.inequality_id = "multiplier_global";
    rep.parameters = {{"p", p}, {"q", q}, {"N", sym.support_N}, {"M", sym.deriv_bound_M}};
    const double scale = sym.deriv_bound_M * std::pow(sym.support_N, 3.0 / p - (std::isinf(q) ? 0.0 : 3.0 / q));
    for (const auto& fh : samples) {
        const RealField f = spectral::inverse_transform_unchecked(fh);
        const RealField tf = spectral::inverse_transform_unchecked(apply_multiplier(sym, fh));
        const double denom = scale * spectral::lp_norm(f, p);
        rep.per_sample_ratios.push_back(denom > 0.0 ? spectral::lp_norm(tf, q) / denom : 0.0);
    }
    finalize_ratios(rep);
    return rep;
}

SweepReport local_multiplier_report(const MultiplierSymbol& sym, const BallRegion& omega, double A, double p1,
                                    double q1, double p2, double q2, const std::vector<SpectralField>& samples) {
    require(A >= 1.0, "local_multiplier_report: A must be >= 1");
    require(p1 >= 1.0 && (std::isinf(q1) || q1 >= p1), "local_multiplier_report: need p1 <= q1");
    require(p2 >= 1.0 && (std::isinf(q2) || q2 >= p2), "local_multiplier_report: need p2 <= q2");
    const bool q_ordered = std::isinf(q2) || (!std::isinf(q1) && q2 >= q1);
    require(q_ordered, "local_multiplier_report: need q2 >= q1");

    SweepReport rep;
    rep.inequality_id = "multiplier_local";
    rep.parameters = {{"p1", p1}, {"q1", q1}, {"p2", p2},          {"q2", q2},
                      {"A", A},   {"N", sym.support_N}, {"radius", omega.radius}};
    const double N = sym.support_N;
    const double M = sym.deriv_bound_M;
    for (const auto& fh : samples) {
        const RealField f = spectral::inverse_transform_unchecked(fh);
        const RealField tf = spectral::inverse_transform_unchecked(apply_multiplier(sym, fh));
        std::int64_t omega_count = 0;
        const double lhs = restricted_lp_norm(tf, q1, &omega, 0.0, &omega_count);
        const double near_norm = restricted_lp_norm(f, p1, &omega, A / N);
        const double omega_vol = omega_count * f.grid.cell_volume();
        const double inv_q1 = std::isinf(q1) ? 0.0 : 1.0 / q1;
        const double inv_q2 = std::isinf(q2) ? 0.0 : 1.0 / q2;
        const double term1 = M * std::pow(N, 3.0 / p1 - 3.0 * inv_q1) * near_norm;
        const double term2 = std::pow(A, -50.0) * M * std::pow(omega_vol, inv_q1 - inv_q2) *
                             std::pow(N, 3.0 / p2 - 3.0 * inv_q2) * spectral::lp_norm(f, p2);
        const double denom = term1 + term2;
        rep.per_sample_ratios.push_back(denom > 0.0 ? lhs / denom : 0.0);
    }
    finalize_ratios(rep);
    return rep;
}

RealField derivative_magnitude(const SpectralField& fh, int j) {
    require(j >= 0 && j <= 2, "derivative_magnitude: j must be in {0,1,2}");
    const Grid3 g = fh.grid;
    RealField out(g, 1);
    auto accumulate_sq = [&](const SpectralField& d) {
        const RealField r = spectral::inverse_transform_unchecked(d);
        for (std::int64_t i = 0; i < g.size(); ++i) {
            for (int c = 0; c < r.components; ++c) {
                const double v = r.values[static_cast<std::int64_t>(c) * g.size() + i];
                out.values[i] += v * v;
            }
        }
    };
    if (j == 0) {
        accumulate_sq(fh);
    } else if (j == 1) {
        for (int a = 0; a < 3; ++a) accumulate_sq(spectral::derivative(fh, a));
    } else {
        for (int a = 0; a < 3; ++a) {
            const SpectralField da = spectral::derivative(fh, a);
            for (int b = 0; b < 3; ++b) accumulate_sq(spectral::derivative(da, b));
        }
    }
    for (auto& v : out.values) v = std::sqrt(v);
    return out;
}

SweepReport bernstein_report(const LPProjector& proj, const SpectralField& fh, double N, int j, double p, double q,
                             double heat_time) {
    require(N > 0.0, "bernstein_report: N must be positive");
    require(j >= 0 && j <= 2, "bernstein_report: j must be in {0,1,2}");
    require(p >= 1.0 && (std::isinf(q) || q >= p), "bernstein_report: need 1 <= p <= q");
    require(heat_time >= 0.0, "bernstein_report: heat_time must be >= 0");

    SpectralField work = fh;
    if (heat_time > 0.0) {
        work = spectral::heat_propagate(proj.project_band(fh, N), heat_time);
    } else {
        const double radius = spectral::spectral_radius(fh, 1e-14);
        require(radius <= N * (1.0 + 1e-12), "bernstein_report: spectrum escapes B(0,N)");
    }
    const RealField lhs_field = derivative_magnitude(work, j);
    const double lhs = spectral::lp_norm(lhs_field, q);

    const RealField f = spectral::inverse_transform_unchecked(fh);
    const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
    const double denom = std::exp(-N * N * heat_time / 20.0) * std::pow(N, j + 3.0 / p - 3.0 * inv_q) *
                         spectral::lp_norm(f, p);

    SweepReport rep;
    rep.inequality_id = heat_time > 0.0 ? "bernstein_heat" : "bernstein";
    rep.parameters = {{"N", N}, {"j", j}, {"p", p}, {"q", q}, {"heat_time", heat_time}};
    rep.per_sample_ratios.push_back(denom > 0.0 ? lhs / denom : 0.0);
    finalize_ratios(rep);
    return rep;
}

SweepReport combine_sweep(const std::string& inequality_id, const std::vector<SweepReport>& sweep) {
    SweepReport rep;
    rep.inequality_id = inequality_id;
    rep.parameters = nlohmann::json::array();
    for (const auto& r : sweep) {
        rep.parameters.push_back(r.parameters);
        rep.per_sample_ratios.push_back(r.max_ratio);
    }
    finalize_ratios(rep);
    return rep;
}

}  // namespace lp
}  // namespace cns
