#pragma once

#include <array>

#include <json.hpp>

#include "cns/duhamel.hpp"
#include "cns/solver.hpp"

namespace cns {
namespace carleman {

/// Time-indexed decomposition of d/dt of an enstrophy against its budget
/// terms. Global variant: E = (1/2) int |w_nl|^2, six terms with
///   dE/dt = -Y1 + Y2 + Y3 + Y4 + Y5 + Y6.
/// Local variant: E = (1/2) int |w_nl|^2 eta, nine terms with
///   dE/dt = -Y1 - Y2 + Y3 + ... + Y9.
struct EnstrophyLedger {
    std::vector<double> times;
    std::vector<double> E;
    std::vector<std::array<double, 9>> terms;  // unused trailing entries stay 0
    std::vector<double> fd_dEdt;
    std::vector<double> defect;  // |fd_dEdt - signed sum|
    int n_terms = 0;
    nlohmann::json meta;

    double max_defect() const;
};

EnstrophyLedger global_enstrophy_ledger(const solver::DuhamelSplit& split, const solver::TrajectoryRecord& traj,
                                        double t_begin, double t_end);

/// Annular cutoff eta(t,x) = max(min(A6, |x-center| - R-(t), R+(t) - |x-center|), 0)
/// whose radii contract at rate C0 (A6 + ||u(t)||_inf), realised through the
/// trajectory's accumulated total speed.
struct MovingCutoff {
    Vec3 center;
    double R_minus0 = 0.0;
    double R_plus0 = 0.0;
    double A6 = 0.0;
    double C0 = 1.0;
};

EnstrophyLedger local_enstrophy_ledger(const solver::DuhamelSplit& split, const solver::TrajectoryRecord& traj,
                                       const MovingCutoff& cutoff, double t_begin, double t_end);

/// CSV rows: time, E, Y1..Y9, fd_dEdt, defect.
std::string ledger_csv(const EnstrophyLedger& ledger);

}  // namespace carleman
}  // namespace cns
