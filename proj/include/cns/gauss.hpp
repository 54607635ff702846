#pragma once

#include <cmath>
#include <vector>

namespace cns {

/// Gauss-Legendre nodes and weights on [-1,1], computed once per order by
/// Newton iteration on the Legendre recurrence.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(int order) {
        nodes.resize(order);
        weights.resize(order);
        for (int i = 0; i < order; ++i) {
            // Chebyshev-style initial guess, then Newton.
            double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
            double p_prime = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= order; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                p_prime = order * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / p_prime;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * p_prime * p_prime);
        }
    }

    /// Map to [a,b]: node_at/weight_at.
    double node_at(int i, double a, double b) const { return 0.5 * (a + b) + 0.5 * (b - a) * nodes[i]; }
    double weight_at(int i, double a, double b) const { return 0.5 * (b - a) * weights[i]; }
    int order() const { return static_cast<int>(nodes.size()); }
};

/// Shared per-order cache; map storage keeps references stable.
const GaussLegendre& gauss_legendre(int order);

}  // namespace cns
