#ifndef DSTRIPE_COMPOSITE_HPP
#define DSTRIPE_COMPOSITE_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dstripe/striping.hpp"

namespace dstripe {

// File-size boundary at which the striping configuration changes. The
// boundary is the exclusive end of the segment below it.
struct Watermark {
    uint64_t boundary = 0;
};

// One contiguous slice of the logical file with its own striping. end is
// empty for the final, unbounded segment.
struct SegmentSpec {
    uint64_t start = 0;
    std::optional<uint64_t> end;  // exclusive; nullopt = unbounded
    StripingConfig config;
    std::string dir_label;        // e.g. "4ost-1mb"

    bool unbounded() const { return !end.has_value(); }
    bool contains(uint64_t offset) const {
        return offset >= start && (!end || offset < *end);
    }
};

// Ordered, contiguous segments starting at 0; the last one is unbounded.
struct CompositeLayout {
    std::vector<SegmentSpec> segments;

    void validate() const;  // throws std::invalid_argument
    size_t size() const { return segments.size(); }
};

// One of the ten fixed stripe count/width combinations, named A..J.
struct DirectoryType {
    char letter = 'A';
    StripingConfig config;
};

const std::array<DirectoryType, 10>& directory_types();
const DirectoryType& directory_type(char letter);  // throws on unknown letter

// "4ost-1mb" for (count=4, width=1 MiB)
std::string dir_label_for(const StripingConfig& config);

// Builds a layout with |watermarks|+1 segments: segment i spans
// [w_{i-1}, w_i) with w_0 = 0, and the last segment is unbounded.
// Watermarks must be strictly ascending and configs.size() must be
// watermarks.size() + 1.
CompositeLayout build_layout(const std::vector<Watermark>& watermarks,
                             const std::vector<StripingConfig>& configs);

// Convenience: build from directory-type letters, e.g. {"A","B","C"}.
CompositeLayout build_layout_from_types(const std::vector<Watermark>& watermarks,
                                        const std::string& letters);

struct SegmentPosition {
    size_t segment_index = 0;
    uint64_t offset_in_segment = 0;
    bool operator==(const SegmentPosition&) const = default;
};

struct SubRange {
    size_t segment_index = 0;
    uint64_t offset_in_segment = 0;
    uint64_t length = 0;
    bool operator==(const SubRange&) const = default;
};

struct LayoutFragment {
    size_t segment_index = 0;
    uint64_t logical_offset = 0;
    ChunkAddress chunk;
    bool operator==(const LayoutFragment&) const = default;
};

// Segment containing a logical offset, plus the offset within it.
SegmentPosition resolve(const CompositeLayout& layout, uint64_t offset);

// Cuts [offset, offset+length) at segment boundaries. Sub-ranges are
// ordered, contiguous and cover the extent exactly; zero length yields {}.
std::vector<SubRange> split_range(const CompositeLayout& layout,
                                  uint64_t offset, uint64_t length);

// split_range followed by decompose_extent under each segment's config.
// Object offsets are relative to the segment's own objects. Every config's
// stripe_count must fit in the pool.
std::vector<LayoutFragment> full_decompose(const CompositeLayout& layout,
                                           const OstPool& pool,
                                           uint64_t offset, uint64_t length);

} // namespace dstripe

#endif
