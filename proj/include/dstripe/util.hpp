#ifndef DSTRIPE_UTIL_HPP
#define DSTRIPE_UTIL_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

namespace dstripe {

inline constexpr uint64_t KiB = 1024ULL;
inline constexpr uint64_t MiB = 1024ULL * 1024;
inline constexpr uint64_t GiB = 1024ULL * 1024 * 1024;
inline constexpr uint64_t TiB = 1024ULL * 1024 * 1024 * 1024;

// Parses "64", "4k", "1MiB", "2 GB", "1tb"... Binary units throughout:
// k/kb/kib = 2^10, m/mb/mib = 2^20, g/gb/gib = 2^30, t/tb/tib = 2^40.
uint64_t parse_size(const std::string& text);

// "4194304" -> "4mb", "1536" -> "1536b"; exact binary multiples only
std::string format_size_label(uint64_t bytes);

// human-oriented, e.g. "1.50 GiB"
std::string format_size_human(uint64_t bytes);

uint64_t fnv1a64(std::span<const uint8_t> data);

// streaming checksum of a whole file
uint64_t fnv1a64_file(const std::filesystem::path& path);

} // namespace dstripe

#endif
