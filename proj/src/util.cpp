#include "dstripe/util.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace dstripe {

uint64_t parse_size(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c)))
            s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (s.empty()) throw std::invalid_argument("parse_size: empty string");

    size_t pos = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == 0) throw std::invalid_argument("parse_size: no digits in '" + text + "'");

    const uint64_t value = std::stoull(s.substr(0, pos));
    const std::string unit = s.substr(pos);

    uint64_t mult = 1;
    if (unit.empty() || unit == "b") mult = 1;
    else if (unit == "k" || unit == "kb" || unit == "kib") mult = KiB;
    else if (unit == "m" || unit == "mb" || unit == "mib") mult = MiB;
    else if (unit == "g" || unit == "gb" || unit == "gib") mult = GiB;
    else if (unit == "t" || unit == "tb" || unit == "tib") mult = TiB;
    else throw std::invalid_argument("parse_size: unknown unit '" + unit + "'");

    if (mult != 1 && value > UINT64_MAX / mult)
        throw std::invalid_argument("parse_size: overflow");
    return value * mult;
}

std::string format_size_label(uint64_t bytes) {
    char buf[32];
    if (bytes >= MiB && bytes % MiB == 0)
        std::snprintf(buf, sizeof buf, "%llumb", static_cast<unsigned long long>(bytes / MiB));
    else if (bytes >= KiB && bytes % KiB == 0)
        std::snprintf(buf, sizeof buf, "%llukb", static_cast<unsigned long long>(bytes / KiB));
    else
        std::snprintf(buf, sizeof buf, "%llub", static_cast<unsigned long long>(bytes));
    return buf;
}

std::string format_size_human(uint64_t bytes) {
    static const char* units[] = {"B", "KiB", "MiB", "GiB", "TiB"};
    double v = static_cast<double>(bytes);
    int u = 0;
    while (v >= 1024.0 && u < 4) {
        v /= 1024.0;
        ++u;
    }
    char buf[48];
    if (u == 0)
        std::snprintf(buf, sizeof buf, "%llu B", static_cast<unsigned long long>(bytes));
    else
        std::snprintf(buf, sizeof buf, "%.2f %s", v, units[u]);
    return buf;
}

uint64_t fnv1a64(std::span<const uint8_t> data) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (uint8_t b : data) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

uint64_t fnv1a64_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    uint64_t h = 0xcbf29ce484222325ULL;
    std::vector<char> buf(1 << 20);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<uint8_t>(buf[static_cast<size_t>(i)]);
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

} // namespace dstripe
