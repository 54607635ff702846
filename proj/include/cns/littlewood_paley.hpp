#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <json.hpp>

#include "cns/spectral_core.hpp"

namespace cns {
namespace lp {

/// Radial bump: phi = 1 on [0,1/2], 0 on [1,inf), C-infinity monotone
/// transition built from the flat mollifier exp(-1/(s(1-s))).
class BumpProfile {
  public:
    BumpProfile();
    double operator()(double r) const;
    /// Number of continuous derivatives guaranteed (unbounded here).
    int smoothness_order() const { return 1 << 30; }

  private:
    double transition_mass_;  // integral of the mollifier over [0,1]
};

/// Cached dyadic projection symbols over one grid.
/// P_leq(N) has symbol phi(|xi|/N); P_N = P_leq(N) - P_leq(N/2);
/// P~_N = P_leq(2N) - P_leq(N/4); P_gt(N) = Id - P_leq(N).
class LPProjector {
  public:
    explicit LPProjector(const Grid3& grid, BumpProfile profile = BumpProfile());

    const Grid3& grid() const { return grid_; }
    const BumpProfile& profile() const { return profile_; }

    SpectralField project_leq(const SpectralField& fh, double N) const;
    SpectralField project_band(const SpectralField& fh, double N) const;
    SpectralField project_tilde(const SpectralField& fh, double N) const;
    SpectralField project_gt(const SpectralField& fh, double N) const;

    /// Symbol array of P_leq(N) over storage-ordered modes (cached).
    const std::vector<double>& symbol_leq(double N) const;

  private:
    Grid3 grid_;
    BumpProfile profile_;
    mutable std::mutex mutex_;
    mutable std::map<double, std::vector<double>> cache_;
};

/// Dyadic frequency ladder 2^k/L intersected with (0, 2*nyquist].
std::vector<double> dyadic_ladder(const Grid3& grid);
/// True if N = 2^k/L for some integer k, within tolerance.
bool on_dyadic_ladder(const Grid3& grid, double N, double rel_tol = 1e-9);

/// General Fourier multiplier m(xi) supported in B(0, support_N) with
/// |m| <= deriv_bound_M.
struct MultiplierSymbol {
    std::function<Complex(const Vec3&)> m;
    double support_N = 0.0;
    double deriv_bound_M = 1.0;
};

SpectralField apply_multiplier(const MultiplierSymbol& sym, const SpectralField& fh);

/// Report schema shared by the empirical-constant checks.
struct SweepReport {
    std::string inequality_id;
    nlohmann::json parameters;
    std::vector<double> per_sample_ratios;
    double max_ratio = 0.0;
    double sweep_spread = 0.0;  // max/min over positive ratios
    nlohmann::json to_json() const;
};

/// Ratio ||T_m f||_q / (M N^{3/p-3/q} ||f||_p) over the samples.
SweepReport multiplier_bound_report(const MultiplierSymbol& sym, double p, double q,
                                    const std::vector<SpectralField>& samples);

/// Ball descriptor for the local multiplier estimate's region Omega.
struct BallRegion {
    Vec3 center;
    double radius = 0.0;
};

/// Two-term local bound: ||T_m f||_{q1(Omega)} vs
/// M N^{3/p1-3/q1} ||f||_{p1(Omega_{A/N})} + A^{-50} M |Omega|^{1/q1-1/q2} N^{3/p2-3/q2} ||f||_{p2}.
SweepReport local_multiplier_report(const MultiplierSymbol& sym, const BallRegion& omega, double A, double p1,
                                    double q1, double p2, double q2, const std::vector<SpectralField>& samples);

/// Bernstein ratio ||grad^j e^{t Lap} P f||_q / (e^{-N^2 t/20} N^{j+3/p-3/q} ||f||_p).
/// With heat_time = 0, P is the identity and the spectrum must lie in B(0,N);
/// with heat_time > 0 the band projection P_N is applied first.
SweepReport bernstein_report(const LPProjector& proj, const SpectralField& fh, double N, int j, double p, double q,
                             double heat_time = 0.0);

/// Collapse per-N reports of one sweep into a single report whose
/// sweep_spread is max/min of the per-N max ratios.
SweepReport combine_sweep(const std::string& inequality_id, const std::vector<SweepReport>& sweep);

/// Pointwise magnitude |grad^j f| as a scalar real field (Frobenius norm of
/// the full j-th derivative tensor); j in {0,1,2}.
RealField derivative_magnitude(const SpectralField& fh, int j);

}  // namespace lp
}  // namespace cns
