#include "cns/snapshot_io.hpp"

#include <cstring>
#include <fstream>

#include "cns/errors.hpp"

namespace cns {

namespace {

// The format is little-endian; this code targets little-endian hosts and
// writes raw f64/u32 values directly.

template <typename T>
void put(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

}  // namespace

void write_snapshot(const std::string& path, const SpectralField& field, double time) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(out.good(), "write_snapshot: cannot open " + path);
    out.write("CNS1", 4);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(field.grid.n));
    put<double>(out, field.grid.L);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(field.components));
    put<double>(out, time);
    for (const auto& c : field.coeffs) {
        put<double>(out, c.real());
        put<double>(out, c.imag());
    }
    require(out.good(), "write_snapshot: write failed for " + path);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "read_snapshot: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    require(in.good() && std::memcmp(magic, "CNS1", 4) == 0, "read_snapshot: bad magic in " + path);
    const auto n = get<std::uint32_t>(in);
    const double L = get<double>(in);
    const auto components = get<std::uint32_t>(in);
    const double time = get<double>(in);
    Snapshot snap;
    snap.time = time;
    snap.field = SpectralField(Grid3(static_cast<int>(n), L), static_cast<int>(components));
    for (auto& c : snap.field.coeffs) {
        const double re = get<double>(in);
        const double im = get<double>(in);
        c = Complex(re, im);
    }
    require(in.good(), "read_snapshot: truncated file " + path);
    return snap;
}

}  // namespace cns
