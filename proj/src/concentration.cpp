#include "cns/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cns {
namespace concentration {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

lp::LPProjector projector_for(const TrajectoryRecord& traj) { return lp::LPProjector(traj.config.grid); }

bool lex_less(const Vec3& a, const Vec3& b) {
    for (int i = 0; i < 3; ++i) {
        if (a[i] < b[i]) return true;
        if (a[i] > b[i]) return false;
    }
    return false;
}
}  // namespace

nlohmann::json ConcentrationEvent::to_json() const {
    return {{"t", t}, {"x", {x[0], x[1], x[2]}}, {"N", N}, {"value", value}};
}

double concentration_value(const TrajectoryRecord& traj, double t, const Vec3& x, double N) {
    require(lp::on_dyadic_ladder(traj.config.grid, N), "concentration_value: N is not on the dyadic ladder");
    const int i = traj.index_of_time(t);
    const lp::LPProjector proj = projector_for(traj);
    const SpectralField band = proj.project_band(traj.snapshots[i], N);
    // x is wrapped periodically by the phase factors themselves
    return spectral::eval_at(band, x).norm() / N;
}

std::vector<ConcentrationEvent> scan_concentrations(const TrajectoryRecord& traj, const std::vector<double>& N_list,
                                                    double threshold) {
    require(!N_list.empty(), "scan_concentrations: empty N list");
    require(threshold > 0.0, "scan_concentrations: threshold must be positive");
    const lp::LPProjector proj = projector_for(traj);
    const Grid3& g = traj.config.grid;
    std::vector<ConcentrationEvent> events;
    for (int i = 0; i < traj.size(); ++i) {
        for (double N : N_list) {
            const RealField band = spectral::inverse_transform_unchecked(proj.project_band(traj.snapshots[i], N));
            std::int64_t idx = 0;
            for (int i0 = 0; i0 < g.n; ++i0)
                for (int i1 = 0; i1 < g.n; ++i1)
                    for (int i2 = 0; i2 < g.n; ++i2, ++idx) {
                        const double value = band.magnitude(idx) / N;
                        if (value >= threshold)
                            events.push_back({traj.times[i], g.point(i0, i1, i2), N, value});
                    }
        }
    }
    std::sort(events.begin(), events.end(), [](const ConcentrationEvent& a, const ConcentrationEvent& b) {
        if (a.t != b.t) return a.t > b.t;
        if (a.N != b.N) return a.N < b.N;
        return lex_less(a.x, b.x);
    });
    return events;
}

nlohmann::json ChainReport::to_json() const {
    nlohmann::json evs = nlohmann::json::array();
    for (const auto& e : events) evs.push_back(e.to_json());
    nlohmann::json links = nlohmann::json::array();
    for (const auto& r : link_ratios)
        links.push_back({{"dt_scaled", r.dt_scaled}, {"dx_scaled", r.dx_scaled}, {"freq_ratio", r.freq_ratio}});
    return {{"events", evs}, {"link_ratios", links}, {"threshold", threshold},
            {"termination_reason", termination_reason}};
}

ChainReport back_propagate_chain(const TrajectoryRecord& traj, const ConcentrationEvent& seed,
                                 const SurrogateConstants& consts, const ChainWindows& windows) {
    const double threshold = 1.0 / consts.A_j(1);
    require(seed.value >= threshold, "back_propagate_chain: seed value below A_1^{-1} threshold");

    const Grid3& g = traj.config.grid;
    const lp::LPProjector proj = projector_for(traj);
    const std::vector<double> ladder = lp::dyadic_ladder(g);

    ChainReport report;
    report.threshold = threshold;
    report.events.push_back(seed);

    ConcentrationEvent current = seed;
    while (true) {
        const double t_hi = current.t - windows.time_lo / (current.N * current.N);
        const double t_lo_raw = current.t - windows.time_hi / (current.N * current.N);
        if (t_hi < traj.start_time() - 1e-12) {
            report.termination_reason = "time window lies entirely before trajectory start";
            break;
        }
        const bool truncated = t_lo_raw < traj.start_time() - 1e-12;
        const double t_lo = std::max(t_lo_raw, traj.start_time());
        ConcentrationEvent best;
        bool found = false;
        for (int i = 0; i < traj.size(); ++i) {
            const double t2 = traj.times[i];
            if (t2 < t_lo - 1e-12 || t2 > t_hi + 1e-12) continue;
            for (double N2 : ladder) {
                if (N2 < current.N / windows.freq - 1e-12 || N2 > current.N * windows.freq + 1e-12) continue;
                const RealField band = spectral::inverse_transform_unchecked(proj.project_band(traj.snapshots[i], N2));
                std::int64_t idx = 0;
                for (int i0 = 0; i0 < g.n; ++i0)
                    for (int i1 = 0; i1 < g.n; ++i1)
                        for (int i2 = 0; i2 < g.n; ++i2, ++idx) {
                            const Vec3 x2 = g.point(i0, i1, i2);
                            if (g.periodic_distance(x2, current.x) > windows.space / current.N) continue;
                            const double value = band.magnitude(idx) / N2;
                            if (value < threshold) continue;
                            const ConcentrationEvent cand{t2, x2, N2, value};
                            const bool better =
                                !found || cand.value > best.value ||
                                (cand.value == best.value &&
                                 (cand.N < best.N || (cand.N == best.N && (cand.t < best.t ||
                                  (cand.t == best.t && lex_less(cand.x, best.x))))));
                            if (better) {
                                best = cand;
                                found = true;
                            }
                        }
            }
        }
        if (!found) {
            report.termination_reason = truncated ? "trajectory start reached within the search window"
                                                  : "no successor above threshold in the window";
            break;
        }
        ChainLinkRatios ratios;
        ratios.dt_scaled = (current.t - best.t) * current.N * current.N;
        ratios.dx_scaled = g.periodic_distance(best.x, current.x) * current.N;
        ratios.freq_ratio = best.N / current.N;
        report.link_ratios.push_back(ratios);
        report.events.push_back(best);
        current = best;
    }
    return report;
}

std::string events_jsonl(const std::vector<ConcentrationEvent>& events) {
    std::string out;
    for (const auto& e : events) out += e.to_json().dump() + "\n";
    return out;
}

std::string chain_jsonl(const ChainReport& chain) {
    std::string out;
    for (size_t i = 0; i < chain.events.size(); ++i) {
        nlohmann::json line = chain.events[i].to_json();
        if (i > 0) {
            const auto& r = chain.link_ratios[i - 1];
            line["link_ratios"] = {{"dt_scaled", r.dt_scaled},
                                   {"dx_scaled", r.dx_scaled},
                                   {"freq_ratio", r.freq_ratio}};
        }
        out += line.dump() + "\n";
    }
    return out;
}

TotalSpeed total_speed(const TrajectoryRecord& traj, double t_begin, double t_end) {
    require(t_end > t_begin, "total_speed: degenerate interval");
    require(t_begin >= traj.start_time() - 1e-12 && t_end <= traj.end_time() + 1e-12,
            "total_speed: interval outside trajectory");
    // linear interpolation of ||u||_inf at the endpoints, trapezoid between snapshots
    auto linf_at = [&](double t) {
        for (int i = 0; i + 1 < traj.size(); ++i) {
            if (t >= traj.times[i] - 1e-12 && t <= traj.times[i + 1] + 1e-12) {
                const double w = (t - traj.times[i]) / (traj.times[i + 1] - traj.times[i]);
                return (1.0 - w) * traj.diagnostics[i].linf_norm + w * traj.diagnostics[i + 1].linf_norm;
            }
        }
        return traj.diagnostics.back().linf_norm;
    };
    std::vector<double> ts{t_begin};
    for (int i = 0; i < traj.size(); ++i)
        if (traj.times[i] > t_begin + 1e-12 && traj.times[i] < t_end - 1e-12) ts.push_back(traj.times[i]);
    ts.push_back(t_end);
    double acc = 0.0;
    for (size_t i = 1; i < ts.size(); ++i)
        acc += 0.5 * (linf_at(ts[i - 1]) + linf_at(ts[i])) * (ts[i] - ts[i - 1]);
    TotalSpeed out;
    out.integral = acc;
    out.ratio = acc / std::sqrt(t_end - t_begin);
    return out;
}

nlohmann::json Epoch::to_json() const {
    return {{"begin", begin},
            {"end", end},
            {"parent_begin", parent_begin},
            {"parent_end", parent_end},
            {"certificates", certificates},
            {"worst_certificate", worst_certificate}};
}

namespace {
/// Per-snapshot sup norms of u, grad u, omega, grad omega over the grid.
struct SupNorms {
    double u = 0.0, grad_u = 0.0, omega = 0.0, grad_omega = 0.0;
};

SupNorms sup_norms(const SpectralField& uh) {
    SupNorms s;
    const double inf = std::numeric_limits<double>::infinity();
    s.u = spectral::lp_norm(spectral::inverse_transform_unchecked(uh), inf);
    s.grad_u = spectral::lp_norm(lp::derivative_magnitude(uh, 1), inf);
    const SpectralField wh = spectral::curl(uh);
    s.omega = spectral::lp_norm(spectral::inverse_transform_unchecked(wh), inf);
    s.grad_omega = spectral::lp_norm(lp::derivative_magnitude(wh, 1), inf);
    return s;
}
}  // namespace

double epoch_certificate(const TrajectoryRecord& traj, double parent_begin, double parent_end, double begin,
                         double end, std::array<double, 4>* parts) {
    const double len = parent_end - parent_begin;
    SupNorms sup;
    for (int i = 0; i < traj.size(); ++i) {
        if (traj.times[i] < begin - 1e-12 || traj.times[i] > end + 1e-12) continue;
        const SupNorms s = sup_norms(traj.snapshots[i]);
        sup.u = std::max(sup.u, s.u);
        sup.grad_u = std::max(sup.grad_u, s.grad_u);
        sup.omega = std::max(sup.omega, s.omega);
        sup.grad_omega = std::max(sup.grad_omega, s.grad_omega);
    }
    const std::array<double, 4> certs = {sup.u * std::sqrt(len), sup.grad_u * len, sup.omega * len,
                                         sup.grad_omega * std::pow(len, 1.5)};
    if (parts) *parts = certs;
    return *std::max_element(certs.begin(), certs.end());
}

Epoch find_epoch(const TrajectoryRecord& traj, double t_begin, double t_end, int subdivisions) {
    require(subdivisions >= 1, "find_epoch: subdivisions must be >= 1");
    int count = 0;
    for (int i = 0; i < traj.size(); ++i)
        if (traj.times[i] >= t_begin - 1e-12 && traj.times[i] <= t_end + 1e-12) ++count;
    require(count >= subdivisions, "find_epoch: too few snapshots in the interval");

    Epoch best;
    best.parent_begin = t_begin;
    best.parent_end = t_end;
    bool have = false;
    for (int level = 1; level <= subdivisions; level *= 2) {
        const double len = (t_end - t_begin) / level;
        for (int i = 0; i < level; ++i) {
            const double a = t_begin + i * len;
            const double b = a + len;
            std::array<double, 4> parts;
            const double worst = epoch_certificate(traj, t_begin, t_end, a, b, &parts);
            if (!have || worst < best.worst_certificate) {
                best.begin = a;
                best.end = b;
                best.certificates = parts;
                best.worst_certificate = worst;
                have = true;
            }
        }
    }
    return best;
}

nlohmann::json Annulus::to_json() const {
    return {{"center", {center[0], center[1], center[2]}},
            {"R", R},
            {"kappa", kappa},
            {"t_begin", t_begin},
            {"t_end", t_end},
            {"t_pigeonhole", t_pigeonhole},
            {"integrand_value", integrand_value},
            {"candidate_values", candidate_values},
            {"certificates", certificates}};
}

Annulus find_annulus(const TrajectoryRecord& traj, const Vec3& x0, double T_prime, double R0, double kappa,
                     int n_scales) {
    require(kappa >= 2.0, "find_annulus: kappa must be >= 2");
    require(n_scales >= 1, "find_annulus: n_scales must be >= 1");
    const Grid3& g = traj.config.grid;
    require(std::pow(kappa, n_scales) * R0 < g.L / 2.0, "find_annulus: annulus escapes the box");

    const double t0 = traj.end_time();
    require(t0 - 2.0 * T_prime >= traj.start_time() - 1e-12,
            "find_annulus: trajectory too short (needs 2 T' of history)");

    // Duhamel reference a full window before the pigeonhole range.
    int ref_idx = 0;
    for (int i = 0; i < traj.size(); ++i)
        if (traj.times[i] <= t0 - 2.0 * T_prime + 1e-12) ref_idx = i;
    const solver::DuhamelSplit split = solver::duhamel_split(traj, traj.times[ref_idx]);

    // pigeonhole time t1 in [t0 - 1.5 T', t0 - T'] minimizing ||grad u_nl||_2^2
    int t1_idx = -1;
    double best_diss = kInf;
    for (int i = 0; i < traj.size(); ++i) {
        if (traj.times[i] < t0 - 1.5 * T_prime - 1e-12 || traj.times[i] > t0 - T_prime + 1e-12) continue;
        const SpectralField nl = split.nonlinear_at(traj.snapshots[i], traj.times[i]);
        const double d = spectral::dissipation_norm_sq(nl);
        if (d < best_diss) {
            best_diss = d;
            t1_idx = i;
        }
    }
    require(t1_idx >= 0, "find_annulus: no snapshot in the pigeonhole range");

    // localized integrand at t1: |grad u_nl|^2 + sum_{j<=4} |grad^j u_lin|^3
    const SpectralField u_nl = split.nonlinear_at(traj.snapshots[t1_idx], traj.times[t1_idx]);
    const SpectralField u_lin = split.linear_at(traj.times[t1_idx]);
    RealField integrand(g, 1);
    {
        const RealField grad_nl = lp::derivative_magnitude(u_nl, 1);
        for (std::int64_t i = 0; i < g.size(); ++i) integrand.values[i] = grad_nl.values[i] * grad_nl.values[i];
        const RealField lin0 = spectral::inverse_transform_unchecked(u_lin);
        for (std::int64_t i = 0; i < g.size(); ++i) {
            const double m = lin0.magnitude(i);
            integrand.values[i] += m * m * m;
        }
        // |grad^j u_lin|^3 for j=1..4 via multi-index sums with multiplicity:
        // |grad^j f|^2 = sum_{|alpha|=j} j!/alpha! sum_c |d^alpha f_c|^2
        auto factorial = [](int k) { return k <= 1 ? 1.0 : k == 2 ? 2.0 : k == 3 ? 6.0 : 24.0; };
        for (int j = 1; j <= 4; ++j) {
            RealField mag_sq(g, 1);
            for (int a0 = 0; a0 <= j; ++a0)
                for (int a1 = 0; a1 + a0 <= j; ++a1) {
                    const int a2 = j - a0 - a1;
                    const double mult = factorial(j) / (factorial(a0) * factorial(a1) * factorial(a2));
                    SpectralField d = u_lin;
                    for (int r = 0; r < a0; ++r) d = spectral::derivative(d, 0);
                    for (int r = 0; r < a1; ++r) d = spectral::derivative(d, 1);
                    for (int r = 0; r < a2; ++r) d = spectral::derivative(d, 2);
                    const RealField rd = spectral::inverse_transform_unchecked(d);
                    for (std::int64_t i = 0; i < g.size(); ++i)
                        for (int c = 0; c < rd.components; ++c) {
                            const double v = rd.values[static_cast<std::int64_t>(c) * g.size() + i];
                            mag_sq.values[i] += mult * v * v;
                        }
                }
            for (std::int64_t i = 0; i < g.size(); ++i)
                integrand.values[i] += std::pow(mag_sq.values[i], 1.5);
        }
    }

    Annulus out;
    out.center = x0;
    out.kappa = kappa;
    out.t_begin = t0 - T_prime;
    out.t_end = t0;
    out.t_pigeonhole = traj.times[t1_idx];
    int best_m = 0;
    for (int m = 0; m < n_scales; ++m) {
        const double R = std::pow(kappa, m) * R0;
        double acc = 0.0;
        std::int64_t idx = 0;
        for (int i0 = 0; i0 < g.n; ++i0)
            for (int i1 = 0; i1 < g.n; ++i1)
                for (int i2 = 0; i2 < g.n; ++i2, ++idx) {
                    const double d = g.periodic_distance(g.point(i0, i1, i2), x0);
                    if (d >= R && d <= kappa * R) acc += integrand.values[idx];
                }
        acc *= g.cell_volume();
        out.candidate_values.push_back(acc);
        if (m == 0 || acc < out.candidate_values[best_m]) best_m = m;
    }
    out.R = std::pow(kappa, best_m) * R0;
    out.integrand_value = out.candidate_values[best_m];

    // sup-norm certificates over the spacetime annulus, scaled by T' powers
    std::array<double, 4> sup = {0, 0, 0, 0};
    for (int i = 0; i < traj.size(); ++i) {
        if (traj.times[i] < out.t_begin - 1e-12 || traj.times[i] > out.t_end + 1e-12) continue;
        const SpectralField& uh = traj.snapshots[i];
        const RealField u = spectral::inverse_transform_unchecked(uh);
        const RealField gu = lp::derivative_magnitude(uh, 1);
        const SpectralField wh = spectral::curl(uh);
        const RealField w = spectral::inverse_transform_unchecked(wh);
        const RealField gw = lp::derivative_magnitude(wh, 1);
        std::int64_t idx = 0;
        for (int i0 = 0; i0 < g.n; ++i0)
            for (int i1 = 0; i1 < g.n; ++i1)
                for (int i2 = 0; i2 < g.n; ++i2, ++idx) {
                    const double d = g.periodic_distance(g.point(i0, i1, i2), x0);
                    if (d < out.R || d > kappa * out.R) continue;
                    sup[0] = std::max(sup[0], u.magnitude(idx));
                    sup[1] = std::max(sup[1], gu.values[idx]);
                    sup[2] = std::max(sup[2], w.magnitude(idx));
                    sup[3] = std::max(sup[3], gw.values[idx]);
                }
    }
    out.certificates = {sup[0] * std::sqrt(T_prime), sup[1] * T_prime, sup[2] * T_prime,
                        sup[3] * std::pow(T_prime, 1.5)};
    return out;
}

nlohmann::json PointwiseDerivativeReport::to_json() const {
    return {{"N", N}, {"A", A}, {"ratios", ratios}};
}

PointwiseDerivativeReport pointwise_derivative_report(const TrajectoryRecord& traj, double t, double N) {
    const int i = traj.index_of_time(t);
    require(i > 0 && i + 1 < traj.size(), "pointwise_derivative_report: t must be interior");
    const lp::LPProjector proj = projector_for(traj);
    const double inf = std::numeric_limits<double>::infinity();

    double A = 0.0;
    for (const auto& d : traj.diagnostics) A = std::max(A, d.l3_norm);

    PointwiseDerivativeReport rep;
    rep.N = N;
    rep.A = A;
    if (A == 0.0) return rep;  // zero trajectory: all ratios zero

    const SpectralField pu = proj.project_band(traj.snapshots[i], N);
    const SpectralField pw = proj.project_band(spectral::curl(traj.snapshots[i]), N);
    const double dt2 = traj.times[i + 1] - traj.times[i - 1];
    SpectralField dtu = proj.project_band(traj.snapshots[i + 1], N);
    dtu -= proj.project_band(traj.snapshots[i - 1], N);
    dtu *= 1.0 / dt2;
    SpectralField dtw = proj.project_band(spectral::curl(traj.snapshots[i + 1]), N);
    dtw -= proj.project_band(spectral::curl(traj.snapshots[i - 1]), N);
    dtw *= 1.0 / dt2;

    rep.ratios[0] = spectral::lp_norm(spectral::inverse_transform_unchecked(pu), inf) / (A * N);
    rep.ratios[1] = spectral::lp_norm(lp::derivative_magnitude(pu, 1), inf) / (A * N * N);
    rep.ratios[2] = spectral::lp_norm(spectral::inverse_transform_unchecked(dtu), inf) / (A * A * N * N * N);
    rep.ratios[3] = spectral::lp_norm(spectral::inverse_transform_unchecked(pw), inf) / (A * N * N);
    rep.ratios[4] = spectral::lp_norm(lp::derivative_magnitude(pw, 1), inf) / (A * N * N * N);
    rep.ratios[5] = spectral::lp_norm(spectral::inverse_transform_unchecked(dtw), inf) / (A * A * N * N * N * N);
    return rep;
}

}  // namespace concentration
}  // namespace cns
