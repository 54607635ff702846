#include "cns/enstrophy_ledger.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cns/fft.hpp"
#include "cns/radial_weights.hpp"

namespace cns {
namespace carleman {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Kahan {
    double sum = 0.0, comp = 0.0;
    void add(double term) {
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

/// Collocation integral of the pointwise product: exact for band-limited
/// factors whose total per-axis degree stays below n.
double collocation_integral(const Grid3& g, const std::vector<double>& scalar) {
    Kahan acc;
    for (double v : scalar) acc.add(v);
    return acc.sum * g.cell_volume();
}

/// physical copies of a spectral field's components
std::vector<std::vector<double>> phys(const SpectralField& fh) {
    const RealField r = spectral::inverse_transform_unchecked(fh);
    std::vector<std::vector<double>> out(r.components);
    for (int c = 0; c < r.components; ++c)
        out[c] = std::vector<double>(r.component(c), r.component(c) + r.points());
    return out;
}

std::vector<int> window_indices(const solver::TrajectoryRecord& traj, double t_begin, double t_end) {
    std::vector<int> idx;
    for (int i = 0; i < traj.size(); ++i)
        if (traj.times[i] >= t_begin - 1e-12 && traj.times[i] <= t_end + 1e-12) idx.push_back(i);
    return idx;
}

void finalize_fd(EnstrophyLedger& ledger, const std::vector<double>& all_times, const std::vector<double>& all_E,
                 const std::vector<std::array<double, 9>>& all_terms, const std::vector<double>& signed_sums) {
    // keep interior times only, so every row carries a centered difference
    for (size_t i = 1; i + 1 < all_times.size(); ++i) {
        const double fd = (all_E[i + 1] - all_E[i - 1]) / (all_times[i + 1] - all_times[i - 1]);
        ledger.times.push_back(all_times[i]);
        ledger.E.push_back(all_E[i]);
        ledger.terms.push_back(all_terms[i]);
        ledger.fd_dEdt.push_back(fd);
        ledger.defect.push_back(std::abs(fd - signed_sums[i]));
    }
}

}  // namespace

double EnstrophyLedger::max_defect() const {
    double m = 0.0;
    for (double d : defect) m = std::max(m, d);
    return m;
}

EnstrophyLedger global_enstrophy_ledger(const solver::DuhamelSplit& split, const solver::TrajectoryRecord& traj,
                                        double t_begin, double t_end) {
    require(t_begin >= split.t_ref - 1e-12, "global_enstrophy_ledger: window starts before the split reference");
    const std::vector<int> idx = window_indices(traj, t_begin, t_end);
    require(idx.size() >= 3, "global_enstrophy_ledger: window too short for centered differences");

    const Grid3& g = traj.config.grid;
    std::vector<double> all_times, all_E, signed_sums;
    std::vector<std::array<double, 9>> all_terms;

    for (int i : idx) {
        const double t = traj.times[i];
        const SpectralField u_lin = split.linear_at(t);
        const SpectralField u_nl = split.nonlinear_at(traj.snapshots[i], t);
        const SpectralField w_nl = spectral::curl(u_nl);
        const SpectralField w_lin = spectral::curl(u_lin);

        const double E = 0.5 * spectral::l2_norm(w_nl) * spectral::l2_norm(w_nl);
        const double Y1 = spectral::dissipation_norm_sq(w_nl);

        const auto u = phys(traj.snapshots[i]);
        const auto wnl = phys(w_nl);
        const auto wlin = phys(w_lin);
        std::vector<std::vector<double>> dwlin(9), dunl(9), dulin(9);
        for (int a = 0; a < 3; ++a) {
            const auto da_wlin = phys(spectral::derivative(w_lin, a));
            const auto da_unl = phys(spectral::derivative(u_nl, a));
            const auto da_ulin = phys(spectral::derivative(u_lin, a));
            for (int c = 0; c < 3; ++c) {
                dwlin[3 * c + a] = da_wlin[c];
                dunl[3 * c + a] = da_unl[c];
                dulin[3 * c + a] = da_ulin[c];
            }
        }
        const std::int64_t npts = g.size();
        std::vector<double> y2(npts), y3(npts), y4(npts), y5(npts), y6(npts);
        for (std::int64_t m = 0; m < npts; ++m) {
            double t2 = 0, t3 = 0, t4 = 0, t5 = 0, t6 = 0;
            for (int c = 0; c < 3; ++c) {
                double adv = 0, s_nl_nl = 0, s_nl_lin = 0, s_lin_nl = 0, s_lin_lin = 0;
                for (int a = 0; a < 3; ++a) {
                    adv += u[a][m] * dwlin[3 * c + a][m];
                    s_nl_nl += wnl[a][m] * dunl[3 * c + a][m];
                    s_nl_lin += wnl[a][m] * dulin[3 * c + a][m];
                    s_lin_nl += wlin[a][m] * dunl[3 * c + a][m];
                    s_lin_lin += wlin[a][m] * dulin[3 * c + a][m];
                }
                t2 += wnl[c][m] * adv;
                t3 += wnl[c][m] * s_nl_nl;
                t4 += wnl[c][m] * s_nl_lin;
                t5 += wnl[c][m] * s_lin_nl;
                t6 += wnl[c][m] * s_lin_lin;
            }
            y2[m] = -t2;
            y3[m] = t3;
            y4[m] = t4;
            y5[m] = t5;
            y6[m] = t6;
        }
        std::array<double, 9> terms = {Y1,
                                       collocation_integral(g, y2),
                                       collocation_integral(g, y3),
                                       collocation_integral(g, y4),
                                       collocation_integral(g, y5),
                                       collocation_integral(g, y6),
                                       0.0,
                                       0.0,
                                       0.0};
        all_times.push_back(t);
        all_E.push_back(E);
        all_terms.push_back(terms);
        signed_sums.push_back(-terms[0] + terms[1] + terms[2] + terms[3] + terms[4] + terms[5]);
    }

    EnstrophyLedger ledger;
    ledger.n_terms = 6;
    ledger.meta = {{"variant", "global"}, {"t_ref", split.t_ref}};
    finalize_fd(ledger, all_times, all_E, all_terms, signed_sums);
    return ledger;
}

namespace {

/// Exact integrals of band-limited products against radial profiles:
/// coefficients are taken on the padded grid, the profile in closed form.
struct SpectralPairing {
    Grid3 big;
    Vec3 center;
    std::vector<Complex> phase0, phase1, phase2;  // e^{2 pi i k c_j / L} per axis

    SpectralPairing(const Grid3& big_grid, const Vec3& c) : big(big_grid), center(c) {
        phase0.resize(big.n);
        phase1.resize(big.n);
        phase2.resize(big.n);
        for (int i = 0; i < big.n; ++i) {
            const double k = big.signed_index(i);
            phase0[i] = std::polar(1.0, kTwoPi * k * c[0] / big.L);
            phase1[i] = std::polar(1.0, kTwoPi * k * c[1] / big.L);
            phase2[i] = std::polar(1.0, kTwoPi * k * c[2] / big.L);
        }
    }

    /// sum_k c_k W(|k|/L) e^{2 pi i k . center / L} for a radial spectral weight W.
    template <typename WeightFn>
    double pair(const std::vector<Complex>& coeffs, WeightFn&& weight) const {
        Kahan re;
        std::int64_t idx = 0;
        for (int i0 = 0; i0 < big.n; ++i0)
            for (int i1 = 0; i1 < big.n; ++i1) {
                const Complex ph01 = phase0[i0] * phase1[i1];
                for (int i2 = 0; i2 < big.n; ++i2, ++idx) {
                    const Complex c = coeffs[idx];
                    if (c.real() == 0.0 && c.imag() == 0.0) continue;
                    const double xi = big.frequency(i0, i1, i2).norm();
                    re.add((c * ph01 * phase2[i2]).real() * weight(xi));
                }
            }
        return re.sum;
    }
};

/// forward transform of a scalar sample array on the padded grid
std::vector<Complex> padded_coeffs(const Grid3& big, const std::vector<double>& samples) {
    std::vector<Complex> buf(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) buf[i] = samples[i];
    fft::forward_3d(buf.data(), big.n);
    const double scale = 1.0 / static_cast<double>(big.size());
    for (auto& c : buf) c *= scale;
    return buf;
}

}  // namespace

EnstrophyLedger local_enstrophy_ledger(const solver::DuhamelSplit& split, const solver::TrajectoryRecord& traj,
                                       const MovingCutoff& cutoff, double t_begin, double t_end) {
    require(t_begin >= split.t_ref - 1e-12, "local_enstrophy_ledger: window starts before the split reference");
    require(cutoff.A6 > 0.0 && cutoff.C0 > 0.0, "local_enstrophy_ledger: A6 and C0 must be positive");
    const std::vector<int> idx = window_indices(traj, t_begin, t_end);
    require(idx.size() >= 3, "local_enstrophy_ledger: window too short for centered differences");

    const Grid3& g = traj.config.grid;
    const Grid3 big(2 * g.n, g.L);
    const SpectralPairing pairing(big, cutoff.center);

    const double t0 = traj.times[idx.front()];
    const double speed0 = traj.diagnostics[idx.front()].total_speed_accum;

    EnstrophyLedger ledger;
    ledger.n_terms = 9;
    ledger.meta = {{"variant", "local"},
                   {"t_ref", split.t_ref},
                   {"R_minus0", cutoff.R_minus0},
                   {"R_plus0", cutoff.R_plus0},
                   {"A6", cutoff.A6},
                   {"C0", cutoff.C0}};

    std::vector<double> all_times, all_E, signed_sums;
    std::vector<std::array<double, 9>> all_terms;
    nlohmann::json radii = nlohmann::json::array();

    auto pad_phys = [&](const SpectralField& f) { return phys(spectral::zero_pad(f, 2)); };

    for (int i : idx) {
        const double t = traj.times[i];
        const double travelled =
            cutoff.C0 * (cutoff.A6 * (t - t0) + (traj.diagnostics[i].total_speed_accum - speed0));
        const double Rm = cutoff.R_minus0 + travelled;
        const double Rp = cutoff.R_plus0 - travelled;
        if (Rm + cutoff.A6 > Rp - cutoff.A6) {
            ledger.meta["halt"] = {{"time", t}, {"reason", "cutoff collapse: R-(t) >= R+(t) - 2 A6"}};
            break;
        }
        radii.push_back({{"t", t}, {"R_minus", Rm}, {"R_plus", Rp}});
        require(Rp < g.L / 2.0, "local_enstrophy_ledger: cutoff annulus escapes the box");
        const double contraction_rate = cutoff.C0 * (cutoff.A6 + traj.diagnostics[i].linf_norm);

        const radial::PiecewiseLinearRadial eta = radial::eta_profile(Rm, Rp, cutoff.A6);
        const radial::PiecewiseLinearRadial inner_shell = radial::shell_indicator(Rm, Rm + cutoff.A6);
        const radial::PiecewiseLinearRadial outer_shell = radial::shell_indicator(Rp - cutoff.A6, Rp);

        const SpectralField u_lin = split.linear_at(t);
        const SpectralField u_nl = split.nonlinear_at(traj.snapshots[i], t);
        const SpectralField w_nl = spectral::curl(u_nl);
        const SpectralField w_lin = spectral::curl(u_lin);

        const auto u = pad_phys(traj.snapshots[i]);
        const auto wnl = pad_phys(w_nl);
        const auto wlin = pad_phys(w_lin);
        std::vector<std::vector<double>> dwnl(9), dwlin(9), dunl(9), dulin(9);
        for (int a = 0; a < 3; ++a) {
            const auto da_wnl = pad_phys(spectral::derivative(w_nl, a));
            const auto da_wlin = pad_phys(spectral::derivative(w_lin, a));
            const auto da_unl = pad_phys(spectral::derivative(u_nl, a));
            const auto da_ulin = pad_phys(spectral::derivative(u_lin, a));
            for (int c = 0; c < 3; ++c) {
                dwnl[3 * c + a] = da_wnl[c];
                dwlin[3 * c + a] = da_wlin[c];
                dunl[3 * c + a] = da_unl[c];
                dulin[3 * c + a] = da_ulin[c];
            }
        }

        const std::int64_t npts = big.size();
        std::vector<double> wnl_sq(npts), grad_wnl_sq(npts);
        for (std::int64_t m = 0; m < npts; ++m) {
            wnl_sq[m] = wnl[0][m] * wnl[0][m] + wnl[1][m] * wnl[1][m] + wnl[2][m] * wnl[2][m];
            double gsq = 0.0;
            for (int q = 0; q < 9; ++q) gsq += dwnl[q][m] * dwnl[q][m];
            grad_wnl_sq[m] = gsq;
        }
        const auto wnl_sq_hat = padded_coeffs(big, wnl_sq);
        const auto grad_wnl_sq_hat = padded_coeffs(big, grad_wnl_sq);

        auto pair_eta = [&](const std::vector<Complex>& ch) {
            return pairing.pair(ch, [&](double xi) { return eta.fourier(xi); });
        };

        const double E = 0.5 * pair_eta(wnl_sq_hat);
        const double Y1 = pair_eta(grad_wnl_sq_hat);

        // Y2 = (1/2) c(t) int |w_nl|^2 |grad eta|, |grad eta| = 1 on both ramps
        const double Y2 =
            0.5 * contraction_rate *
            (pairing.pair(wnl_sq_hat, [&](double xi) { return inner_shell.fourier(xi); }) +
             pairing.pair(wnl_sq_hat, [&](double xi) { return outer_shell.fourier(xi); }));

        // Y3 = (1/2) int |w_nl|^2 Lap eta: ramp parts (+-2/r) plus sphere jumps
        const double ramp_part =
            pairing.pair(wnl_sq_hat,
                         [&](double xi) { return radial::fourier_inverse_r_shell(Rm, Rm + cutoff.A6, 2.0, xi); }) -
            pairing.pair(wnl_sq_hat, [&](double xi) {
                return radial::fourier_inverse_r_shell(Rp - cutoff.A6, Rp, 2.0, xi);
            });
        auto sphere_term = [&](double rho) {
            return rho * rho *
                   pairing.pair(wnl_sq_hat, [&](double xi) { return radial::sphere_j0(xi, rho); });
        };
        const double Y3 = 0.5 * (ramp_part + sphere_term(Rm) - sphere_term(Rm + cutoff.A6) -
                                 sphere_term(Rp - cutoff.A6) + sphere_term(Rp));

        // Y4 = (1/2) int |w_nl|^2 u . grad eta = -(1/2) int div(|w_nl|^2 u) eta
        double Y4;
        {
            std::vector<double> gvec(npts);
            std::vector<Complex> div_hat(npts, Complex(0.0, 0.0));
            for (int a = 0; a < 3; ++a) {
                for (std::int64_t m = 0; m < npts; ++m) gvec[m] = wnl_sq[m] * u[a][m];
                auto ghat = padded_coeffs(big, gvec);
                // accumulate (2 pi i k_a / L) g_a^
                std::int64_t flat = 0;
                for (int i0 = 0; i0 < big.n; ++i0)
                    for (int i1 = 0; i1 < big.n; ++i1)
                        for (int i2 = 0; i2 < big.n; ++i2, ++flat) {
                            const int kidx[3] = {i0, i1, i2};
                            const double kf = kidx[a] == big.n / 2
                                                  ? 0.0
                                                  : kTwoPi * big.signed_index(kidx[a]) / big.L;
                            div_hat[flat] += Complex(0.0, kf) * ghat[flat];
                        }
            }
            Y4 = -0.5 * pair_eta(div_hat);
        }

        // stretching/correction terms: int w_nl . (a . grad) b eta
        auto advective = [&](const std::vector<std::vector<double>>& a_field,
                             const std::vector<std::vector<double>>& db_field) {
            std::vector<double> h(npts);
            for (std::int64_t m = 0; m < npts; ++m) {
                double acc = 0.0;
                for (int c = 0; c < 3; ++c) {
                    double dir = 0.0;
                    for (int a = 0; a < 3; ++a) dir += a_field[a][m] * db_field[3 * c + a][m];
                    acc += wnl[c][m] * dir;
                }
                h[m] = acc;
            }
            return pair_eta(padded_coeffs(big, h));
        };
        const double Y5 = -advective(u, dwlin);
        const double Y6 = advective(wnl, dunl);
        const double Y7 = advective(wnl, dulin);
        const double Y8 = advective(wlin, dunl);
        const double Y9 = advective(wlin, dulin);

        all_times.push_back(t);
        all_E.push_back(E);
        all_terms.push_back({Y1, Y2, Y3, Y4, Y5, Y6, Y7, Y8, Y9});
        signed_sums.push_back(-Y1 - Y2 + Y3 + Y4 + Y5 + Y6 + Y7 + Y8 + Y9);
    }

    require(all_times.size() >= 3, "local_enstrophy_ledger: fewer than 3 usable snapshots before cutoff collapse");
    ledger.meta["radii"] = radii;
    finalize_fd(ledger, all_times, all_E, all_terms, signed_sums);
    return ledger;
}

std::string ledger_csv(const EnstrophyLedger& ledger) {
    std::ostringstream out;
    out << "time,E";
    for (int k = 1; k <= 9; ++k) out << ",Y" << k;
    out << ",fd_dEdt,defect\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf;
    };
    for (size_t i = 0; i < ledger.times.size(); ++i) {
        put(ledger.times[i]);
        out << ',';
        put(ledger.E[i]);
        for (int k = 0; k < 9; ++k) {
            out << ',';
            put(ledger.terms[i][k]);
        }
        out << ',';
        put(ledger.fd_dEdt[i]);
        out << ',';
        put(ledger.defect[i]);
        out << '\n';
    }
    return out.str();
}

}  // namespace carleman
}  // namespace cns
