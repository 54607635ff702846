#include "cns/report_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cns/errors.hpp"

namespace cns {
namespace report {

namespace fs = std::filesystem;

std::string csv_serialize(const CsvTable& table) {
    std::ostringstream out;
    for (size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out << ',';
        out << table.columns[c];
    }
    out << '\n';
    char buf[40];
    for (const auto& row : table.rows) {
        require(row.size() == table.columns.size(), "csv_serialize: row width mismatch");
        for (size_t c = 0; c < row.size(); ++c) {
            require(std::isfinite(row[c]), "csv_serialize: non-finite value in column '" + table.columns[c] + "'");
            if (c) out << ',';
            std::snprintf(buf, sizeof(buf), "%.17g", row[c]);
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

void export_csv(const CsvTable& table, const std::string& path) {
    const std::string text = csv_serialize(table);
    std::ofstream out(path, std::ios::trunc);
    require(out.good(), "export_csv: cannot open " + path);
    out << text;
    require(out.good(), "export_csv: write failed for " + path);
}

CsvTable csv_parse(const std::string& text) {
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "csv_parse: empty input");
    std::istringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) table.columns.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row_in(line);
        std::vector<double> row;
        while (std::getline(row_in, cell, ',')) row.push_back(std::stod(cell));
        require(row.size() == table.columns.size(), "csv_parse: row width mismatch");
        table.rows.push_back(std::move(row));
    }
    return table;
}

CsvTable import_csv(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "import_csv: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return csv_parse(buf.str());
}

namespace {
void validate_finite(const nlohmann::json& doc, const std::string& where) {
    if (doc.is_number_float()) {
        require(std::isfinite(doc.get<double>()), "export_json: non-finite value at '" + where + "'");
    } else if (doc.is_object()) {
        for (auto it = doc.begin(); it != doc.end(); ++it)
            validate_finite(it.value(), where.empty() ? it.key() : where + "." + it.key());
    } else if (doc.is_array()) {
        size_t i = 0;
        for (const auto& v : doc) validate_finite(v, where + "[" + std::to_string(i++) + "]");
    }
}
}  // namespace

void export_json(const nlohmann::json& doc, const std::string& path) {
    validate_finite(doc, "");
    std::ofstream out(path, std::ios::trunc);
    require(out.good(), "export_json: cannot open " + path);
    out << doc.dump(2) << '\n';
    require(out.good(), "export_json: write failed for " + path);
}

nlohmann::json import_json(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "import_json: cannot open " + path);
    return nlohmann::json::parse(in);
}

// ---------------------------------------------------------------------------
// SHA-256 (FIPS 180-4), self-contained
// ---------------------------------------------------------------------------
namespace {

struct Sha256 {
    std::uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                          0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    std::uint64_t total = 0;
    unsigned char block[64];
    size_t fill = 0;

    static std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

    void process(const unsigned char* p) {
        static const std::uint32_t K[64] = {
            0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
            0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
            0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
            0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
            0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
            0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
            0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
            0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
        std::uint32_t w[64];
        for (int i = 0; i < 16; ++i)
            w[i] = (std::uint32_t(p[4 * i]) << 24) | (std::uint32_t(p[4 * i + 1]) << 16) |
                   (std::uint32_t(p[4 * i + 2]) << 8) | std::uint32_t(p[4 * i + 3]);
        for (int i = 16; i < 64; ++i) {
            const std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            const std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5], g = h[6], hh = h[7];
        for (int i = 0; i < 64; ++i) {
            const std::uint32_t S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            const std::uint32_t ch = (e & f) ^ (~e & g);
            const std::uint32_t t1 = hh + S1 + ch + K[i] + w[i];
            const std::uint32_t S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            const std::uint32_t mj = (a & b) ^ (a & c) ^ (b & c);
            const std::uint32_t t2 = S0 + mj;
            hh = g;
            g = f;
            f = e;
            e = d + t1;
            d = c;
            c = b;
            b = a;
            a = t1 + t2;
        }
        h[0] += a; h[1] += b; h[2] += c; h[3] += d;
        h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
    }

    void update(const void* data, size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        total += len;
        while (len > 0) {
            const size_t take = std::min(len, 64 - fill);
            std::memcpy(block + fill, p, take);
            fill += take;
            p += take;
            len -= take;
            if (fill == 64) {
                process(block);
                fill = 0;
            }
        }
    }

    std::string finish() {
        const std::uint64_t bits = total * 8;
        unsigned char pad = 0x80;
        update(&pad, 1);
        const unsigned char zero = 0;
        while (fill != 56) update(&zero, 1);
        unsigned char len_be[8];
        for (int i = 0; i < 8; ++i) len_be[i] = static_cast<unsigned char>(bits >> (56 - 8 * i));
        update(len_be, 8);
        static const char* hex = "0123456789abcdef";
        std::string out(64, '0');
        for (int i = 0; i < 8; ++i)
            for (int b = 0; b < 4; ++b) {
                const unsigned char byte = static_cast<unsigned char>(h[i] >> (24 - 8 * b));
                out[8 * i + 2 * b] = hex[byte >> 4];
                out[8 * i + 2 * b + 1] = hex[byte & 0xf];
            }
        return out;
    }
};

}  // namespace

std::string sha256_hex(const void* data, size_t len) {
    Sha256 s;
    s.update(data, len);
    return s.finish();
}

std::string sha256_hex(const std::string& s) { return sha256_hex(s.data(), s.size()); }

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "sha256_file: cannot open " + path);
    Sha256 s;
    char buf[65536];
    while (in.good()) {
        in.read(buf, sizeof(buf));
        s.update(buf, static_cast<size_t>(in.gcount()));
    }
    return s.finish();
}

nlohmann::json Manifest::to_json() const {
    nlohmann::json files_json = nlohmann::json::array();
    for (const auto& f : files) files_json.push_back({{"path", f.path}, {"bytes", f.bytes}, {"sha256", f.sha256}});
    return {{"files", files_json}, {"meta", meta}};
}

Manifest write_manifest(const std::string& dir, const nlohmann::json& meta) {
    Manifest m;
    m.meta = meta;
    std::vector<std::string> paths;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string rel = fs::relative(entry.path(), dir).generic_string();
        if (rel == "manifest.json") continue;
        paths.push_back(rel);
    }
    std::sort(paths.begin(), paths.end());
    for (const auto& rel : paths) {
        const std::string full = (fs::path(dir) / rel).string();
        ManifestEntry e;
        e.path = rel;
        e.bytes = fs::file_size(full);
        e.sha256 = sha256_file(full);
        m.files.push_back(std::move(e));
    }
    export_json(m.to_json(), (fs::path(dir) / "manifest.json").string());
    return m;
}

}  // namespace report
}  // namespace cns
