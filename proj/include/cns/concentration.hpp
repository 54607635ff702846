#pragma once

#include <json.hpp>

#include "cns/duhamel.hpp"
#include "cns/littlewood_paley.hpp"
#include "cns/solver.hpp"

namespace cns {
namespace concentration {

using solver::TrajectoryRecord;

/// Desk-scale stand-ins for the amplitude ladder A_j = A^{c0^j}.
struct SurrogateConstants {
    double A = 2.0;
    double c0 = 2.0;

    SurrogateConstants() = default;
    SurrogateConstants(double A_, double c0_) : A(A_), c0(c0_) {
        require(A >= 2.0, "SurrogateConstants: A must be >= 2");
        require(c0 >= 2.0, "SurrogateConstants: c0 must be >= 2");
    }
    double A_j(int j) const { return std::pow(A, std::pow(c0, j)); }
};

/// A scale-invariant concentration witness: value = N^{-1} |P_N u(t,x)|.
struct ConcentrationEvent {
    double t = 0.0;
    Vec3 x;
    double N = 0.0;
    double value = 0.0;
    nlohmann::json to_json() const;
};

double concentration_value(const TrajectoryRecord& traj, double t, const Vec3& x, double N);

std::vector<ConcentrationEvent> scan_concentrations(const TrajectoryRecord& traj, const std::vector<double>& N_list,
                                                    double threshold);

struct ChainWindows {
    double time_lo = 0.0;  // (t1-t2) >= time_lo / N1^2
    double time_hi = 0.0;  // (t1-t2) <= time_hi / N1^2
    double space = 0.0;    // |x2-x1| <= space / N1
    double freq = 0.0;     // N2 in [N1/freq, N1*freq]
    static ChainWindows from_constants(const SurrogateConstants& c) {
        return {1.0 / c.A_j(3), c.A_j(3), c.A_j(4), c.A_j(2)};
    }
};

struct ChainLinkRatios {
    double dt_scaled = 0.0;    // (t_{i-1} - t_i) * N_{i-1}^2
    double dx_scaled = 0.0;    // |x_i - x_{i-1}| * N_{i-1}
    double freq_ratio = 0.0;   // N_i / N_{i-1}
};

struct ChainReport {
    std::vector<ConcentrationEvent> events;   // events[0] = seed
    std::vector<ChainLinkRatios> link_ratios; // one per successor
    double threshold = 0.0;
    std::string termination_reason;
    nlohmann::json to_json() const;
};

/// Greedy maximal-value back propagation. Successors are searched over
/// stored snapshots in the time window, grid points within the periodic
/// ball, and ladder frequencies within the frequency window; every accepted
/// link keeps value >= threshold = A_1^{-1}.
ChainReport back_propagate_chain(const TrajectoryRecord& traj, const ConcentrationEvent& seed,
                                 const SurrogateConstants& consts, const ChainWindows& windows);

/// JSON-lines export: one {t, x:[3], N, value} object per line; chain lines
/// after the seed also carry link_ratios.
std::string events_jsonl(const std::vector<ConcentrationEvent>& events);
std::string chain_jsonl(const ChainReport& chain);

/// Trapezoidal int_I ||u||_inf dt and its ratio to |I|^{1/2}.
struct TotalSpeed {
    double integral = 0.0;
    double ratio = 0.0;
};
TotalSpeed total_speed(const TrajectoryRecord& traj, double t_begin, double t_end);

struct Epoch {
    double begin = 0.0, end = 0.0;          // selected I'
    double parent_begin = 0.0, parent_end = 0.0;
    // sup-norm products: {|u| |I|^{1/2}, |grad u| |I|, |omega| |I|, |grad omega| |I|^{3/2}}
    std::array<double, 4> certificates = {0, 0, 0, 0};
    double worst_certificate = 0.0;
    nlohmann::json to_json() const;
};

/// Exact argmin of the worst certificate over the dyadic family of aligned
/// subintervals with length down to |I|/subdivisions.
Epoch find_epoch(const TrajectoryRecord& traj, double t_begin, double t_end, int subdivisions);

/// Candidate certificates for one interval (re-evaluation oracle surface).
double epoch_certificate(const TrajectoryRecord& traj, double parent_begin, double parent_end, double begin,
                         double end, std::array<double, 4>* parts = nullptr);

struct Annulus {
    Vec3 center;
    double R = 0.0;       // inner radius of the selected annulus
    double kappa = 0.0;   // outer radius = kappa * R
    double t_begin = 0.0, t_end = 0.0;  // time window [t0 - T', t0]
    double t_pigeonhole = 0.0;          // time at which the scale was selected
    double integrand_value = 0.0;       // selected scale's localized integrand
    std::vector<double> candidate_values;
    std::array<double, 4> certificates = {0, 0, 0, 0};  // scaled by T' powers
    nlohmann::json to_json() const;
};

/// Pigeonhole over scales R = kappa^m R0: minimizes
/// int_annulus |grad u_nl(t1)|^2 + sum_{j<=4} |grad^j u_lin(t1)|^3 dx.
Annulus find_annulus(const TrajectoryRecord& traj, const Vec3& x0, double T_prime, double R0, double kappa,
                     int n_scales);

struct PointwiseDerivativeReport {
    double N = 0.0;
    double A = 0.0;
    // {|P_N u|/(A N), |grad P_N u|/(A N^2), |d_t P_N u|/(A^2 N^3),
    //  |P_N w|/(A N^2), |grad P_N w|/(A N^3), |d_t P_N w|/(A^2 N^4)}
    std::array<double, 6> ratios = {0, 0, 0, 0, 0, 0};
    nlohmann::json to_json() const;
};

PointwiseDerivativeReport pointwise_derivative_report(const TrajectoryRecord& traj, double t, double N);

}  // namespace concentration
}  // namespace cns
