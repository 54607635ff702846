#pragma once

#include <cmath>
#include <cstdint>

namespace cns {

/// Counter-based generator: every draw is a pure function of (seed, counter),
/// so parallel or reordered evaluation cannot perturb the stream.
struct CounterRng {
    std::uint64_t seed = 0;
    std::uint64_t counter = 0;

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t counter) {
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (counter + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() { return mix(seed, counter++); }

    /// Uniform in [0,1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (consumes two counters).
    double gaussian() {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
        return r * std::cos(6.283185307179586 * u2);
    }
};

}  // namespace cns
