#include "cns/duhamel.hpp"

#include <cmath>

namespace cns {
namespace solver {

DuhamelSplit duhamel_split(const TrajectoryRecord& traj, double t_ref) {
    const int ref = traj.index_of_time(t_ref);
    DuhamelSplit split;
    split.t_ref = traj.times[ref];
    split.ref_state = traj.snapshots[ref];

    double sup_l2 = 0.0;
    std::vector<double> diss_series, times;
    for (int i = ref; i < traj.size(); ++i) {
        const SpectralField nl = split.nonlinear_at(traj.snapshots[i], traj.times[i]);
        sup_l2 = std::max(sup_l2, spectral::l2_norm(nl));
        diss_series.push_back(spectral::dissipation_norm_sq(nl));
        times.push_back(traj.times[i]);
    }
    double acc = 0.0;
    for (size_t i = 1; i < times.size(); ++i)
        acc += 0.5 * (diss_series[i] + diss_series[i - 1]) * (times[i] - times[i - 1]);
    split.sup_unl_l2 = sup_l2;
    split.dissipation_unl = acc;
    return split;
}

}  // namespace solver
}  // namespace cns
