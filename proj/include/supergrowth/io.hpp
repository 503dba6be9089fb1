#pragma once
/**
 * @file io.hpp
 * @brief CSV tables with a trailing digest line, FNV-1a content digests, and
 * the run manifest.
 */

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace supergrowth {

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Round-trippable decimal text for a double; fixed spellings for non-finite values.
inline std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt(std::uint64_t v) { return std::to_string(v); }
inline std::string fmt(std::int64_t v) { return std::to_string(v); }
inline std::string fmt(int v) { return std::to_string(v); }
inline std::string fmt(unsigned v) { return std::to_string(v); }
inline std::string fmt(bool v) { return v ? "1" : "0"; }
inline std::string fmt(const std::string& v) { return v; }
inline std::string fmt(const char* v) { return v; }

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    template <class... Ts>
    void add(const Ts&... cells) {
        rows.push_back({fmt(cells)...});
        if (rows.back().size() != header.size()) throw std::logic_error("CSV row width mismatch");
    }

    /// Header, rows, and optionally the "# manifest-digest: <hex>" trailer.
    std::string render(const std::string& digest = {}) const {
        std::ostringstream os;
        for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
        os << '\n';
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
            os << '\n';
        }
        if (!digest.empty()) os << "# manifest-digest: " << digest << '\n';
        return os.str();
    }
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
}

/**
 * @brief Reproducibility record for one campaign run. Wall time is kept out
 * of the digest so reruns hash identically.
 */
struct RunManifest {
    std::string config_digest;
    std::uint64_t seed = 0;
    std::string tool_version = "0.1.0";
    std::map<std::string, std::string> caps;
    std::map<std::string, std::string> outputs;  ///< file name -> content digest
    double wall_seconds = 0.0;
    bool caps_hit = false;

    std::string digest() const {
        std::string s = config_digest + "|" + std::to_string(seed) + "|" + tool_version;
        for (const auto& [k, v] : caps) s += "|" + k + "=" + v;
        return hex64(fnv1a(s));
    }
};

}  // namespace supergrowth
