#include "cns/config.hpp"

#include <fstream>
#include <sstream>

namespace cns {

namespace {
std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}
}  // namespace

SpectralField ExperimentConfig::build_initial() const {
    if (initial_data == "taylor_green") return solver::taylor_green(solver.grid, amplitude);
    if (initial_data == "shear") return solver::shear_flow(solver.grid, amplitude);
    if (initial_data == "random_band")
        return solver::random_divfree_band(solver.grid, seed, k_min, k_max, amplitude, envelope_sigma);
    if (initial_data == "zero") return SpectralField(solver.grid, 3);
    throw ValidationError("unknown initial_data '" + initial_data + "'");
}

std::map<std::string, std::string> ExperimentConfig::as_flat_map() const {
    std::map<std::string, std::string> m;
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    m["n"] = std::to_string(solver.grid.n);
    m["L"] = num(solver.grid.L);
    m["dt"] = num(solver.dt);
    m["t_end"] = num(solver.t_end);
    m["dealias_fraction"] = num(solver.dealias_fraction);
    m["snapshot_stride"] = std::to_string(solver.snapshot_stride);
    m["initial_data"] = initial_data;
    m["seed"] = std::to_string(seed);
    m["amplitude"] = num(amplitude);
    m["k_min"] = std::to_string(k_min);
    m["k_max"] = std::to_string(k_max);
    m["envelope_sigma"] = num(envelope_sigma);
    return m;
}

void apply_overrides(ExperimentConfig& config, const std::map<std::string, std::string>& overrides) {
    int n = config.solver.grid.n > 0 ? config.solver.grid.n : 32;
    double L = config.solver.grid.L > 0 ? config.solver.grid.L : 2.0 * M_PI;
    for (const auto& [key, raw] : overrides) {
        const std::string value = trim(raw);
        try {
            if (key == "n") n = std::stoi(value);
            else if (key == "L") L = std::stod(value);
            else if (key == "dt") config.solver.dt = std::stod(value);
            else if (key == "t_end") config.solver.t_end = std::stod(value);
            else if (key == "dealias_fraction") config.solver.dealias_fraction = std::stod(value);
            else if (key == "snapshot_stride") config.solver.snapshot_stride = std::stoi(value);
            else if (key == "initial_data") config.initial_data = value;
            else if (key == "seed") config.seed = std::stoull(value);
            else if (key == "amplitude") config.amplitude = std::stod(value);
            else if (key == "k_min") config.k_min = std::stoi(value);
            else if (key == "k_max") config.k_max = std::stoi(value);
            else if (key == "envelope_sigma") config.envelope_sigma = std::stod(value);
            else throw ValidationError("unknown config key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw ValidationError("bad value for config key '" + key + "': " + value);
        } catch (const std::out_of_range&) {
            throw ValidationError("out-of-range value for config key '" + key + "': " + value);
        }
    }
    config.solver.grid = Grid3(n, L);
}

ExperimentConfig parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        require(eq != std::string::npos, "config: expected 'key = value', got '" + line + "'");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    ExperimentConfig config;
    apply_overrides(config, kv);
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "load_config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace cns
