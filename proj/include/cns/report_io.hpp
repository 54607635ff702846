#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace cns {
namespace report {

/// Rectangular numeric table with named columns; floats serialize with 17
/// significant digits so parse-back is bit-exact. NaN/Inf entries are
/// rejected with the offending column named.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::string csv_serialize(const CsvTable& table);
void export_csv(const CsvTable& table, const std::string& path);
CsvTable csv_parse(const std::string& text);
CsvTable import_csv(const std::string& path);

/// JSON export with finite-value validation (field names reported on failure).
void export_json(const nlohmann::json& doc, const std::string& path);
nlohmann::json import_json(const std::string& path);

std::string sha256_hex(const void* data, size_t len);
std::string sha256_hex(const std::string& s);
std::string sha256_file(const std::string& path);

struct ManifestEntry {
    std::string path;  // relative to the artifact directory
    std::uint64_t bytes = 0;
    std::string sha256;
};

struct Manifest {
    std::vector<ManifestEntry> files;  // sorted by path
    nlohmann::json meta;
    nlohmann::json to_json() const;
};

/// Hash every regular file under dir (recursive), paths sorted; writes
/// manifest.json into the directory and returns it.
Manifest write_manifest(const std::string& dir, const nlohmann::json& meta);

}  // namespace report
}  // namespace cns
