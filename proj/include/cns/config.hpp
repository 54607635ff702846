#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "cns/solver.hpp"

namespace cns {

/// Flat key = value configuration (# starts a comment). Recognised keys:
/// n, L, dt, t_end, dealias_fraction, snapshot_stride, initial_data
/// (taylor_green | shear | random_band), seed, amplitude, k_min, k_max,
/// envelope_sigma.
struct ExperimentConfig {
    solver::SolverConfig solver;
    std::string initial_data = "taylor_green";
    std::uint64_t seed = 1;
    double amplitude = 1.0;
    int k_min = 1;
    int k_max = 4;
    double envelope_sigma = 0.0;

    SpectralField build_initial() const;
    std::map<std::string, std::string> as_flat_map() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Overlay of key=value pairs (flags win over file values).
void apply_overrides(ExperimentConfig& config, const std::map<std::string, std::string>& overrides);

}  // namespace cns
