#ifndef DSTRIPE_SEGMENT_STORE_HPP
#define DSTRIPE_SEGMENT_STORE_HPP

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dstripe/composite.hpp"

namespace dstripe {

// On-disk description of a logical file: one record per segment plus the
// current logical size. Serialized as plain text with a versioned header
// line; see serialize() for the exact format.
struct ManifestEntry {
    std::string path;             // relative to the store root
    uint64_t start = 0;
    std::optional<uint64_t> end;  // nullopt = unbounded
    uint32_t stripe_count = 1;
    uint64_t stripe_width = 1;
};

struct Manifest {
    std::string name;
    uint64_t logical_size = 0;
    std::vector<ManifestEntry> entries;

    std::string serialize() const;
    static Manifest parse(const std::string& text);

    CompositeLayout to_layout() const;
    static Manifest from_layout(const std::string& name, const CompositeLayout& layout,
                                uint64_t logical_size);
};

struct StoreOptions {
    // Optional command run once per segment directory right after it is
    // created, for applying real striping attributes on Lustre, e.g.
    //   "lfs setstripe -c {stripe_count} -S {stripe_width} {dir}"
    // Placeholders: {dir}, {stripe_count}, {stripe_width}. A nonzero exit
    // status aborts create(). On ordinary filesystems leave it empty; the
    // striping recorded in the manifest is then advisory only.
    std::string striping_hook;
};

// A collection of per-segment files presented as one addressable byte
// space. Segment i of the layout lives at
//   root / <dir_label> / <name>.part-NN
// and holds logical bytes [segment.start, segment.end). Segment files are
// created lazily on first write; regions below logical_size that were never
// written read back as zeros.
//
// Thread safety: concurrent readers are fine, as are concurrent writers to
// disjoint byte ranges. logical_size is maintained with atomic
// read-modify-write. The manifest on disk is refreshed by flush() (also
// called from the destructor), always via temp-file + rename.
class LogicalFile {
public:
    static LogicalFile create(const std::filesystem::path& root, const std::string& name,
                              const CompositeLayout& layout, const StoreOptions& opts = {});
    static LogicalFile open(const std::filesystem::path& root, const std::string& name);

    LogicalFile(LogicalFile&&) noexcept;
    LogicalFile& operator=(LogicalFile&&) noexcept;
    ~LogicalFile();

    // Returns data.size(); extends logical_size to at least offset+size.
    uint64_t write_at(uint64_t offset, std::span<const uint8_t> data);

    // Returns min(out.size(), logical_size - offset) bytes; 0 at or past EOF.
    size_t read_at(uint64_t offset, std::span<uint8_t> out) const;
    std::vector<uint8_t> read_at(uint64_t offset, size_t length) const;

    void flush();

    uint64_t logical_size() const;
    const CompositeLayout& layout() const;
    const std::string& name() const;
    const std::filesystem::path& root() const;
    std::filesystem::path segment_path(size_t segment_index) const;
    std::filesystem::path manifest_path() const;

    static std::filesystem::path manifest_path_for(const std::filesystem::path& root,
                                                   const std::string& name);
    static std::string segment_file_name(const std::string& name, size_t segment_index);

private:
    struct State;
    LogicalFile() = default;
    std::unique_ptr<State> state_;
};

// Splits an existing file into segment files under root per the layout.
// The concatenation of the created segment files is byte-identical to the
// source.
LogicalFile import_split(const std::filesystem::path& source_file,
                         const std::filesystem::path& root, const std::string& name,
                         const CompositeLayout& layout, const StoreOptions& opts = {});

// Concatenates all segment data below logical_size into dest. Throws
// (naming the path) if a segment file that should hold data is missing.
void export_merge(const LogicalFile& file, const std::filesystem::path& dest);

} // namespace dstripe

#endif
