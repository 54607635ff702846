#pragma once

#include <string>

#include "cns/field.hpp"

namespace cns {

/// Binary snapshot format "CNS1":
///   magic "CNS1" | n:u32 | L:f64 | components:u32 | time:f64   (little-endian)
/// followed by components * n^3 coefficients as (re:f64, im:f64) pairs in
/// component-major, row-major k order (storage index order, k2 fastest).
void write_snapshot(const std::string& path, const SpectralField& field, double time);

struct Snapshot {
    SpectralField field;
    double time = 0.0;
};

Snapshot read_snapshot(const std::string& path);

}  // namespace cns
