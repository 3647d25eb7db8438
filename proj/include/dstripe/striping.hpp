#ifndef DSTRIPE_STRIPING_HPP
#define DSTRIPE_STRIPING_HPP

#include <cstdint>
#include <vector>

namespace dstripe {

// One striping configuration: a file (or file segment) is cut into
// stripe_width-sized units laid out round-robin across stripe_count targets.
struct StripingConfig {
    uint32_t stripe_count = 1;  // number of OSTs the data is spread across
    uint64_t stripe_width = 1;  // bytes per stripe unit

    void validate() const;  // throws std::invalid_argument
    bool operator==(const StripingConfig&) const = default;
};

// An ordered set of object storage targets. ost_ids[k] is the physical id of
// the k-th target in assignment order; a config with stripe_count = n uses
// ost_ids[0..n).
struct OstPool {
    uint32_t num_osts = 0;
    std::vector<uint32_t> ost_ids;

    void validate() const;
    static OstPool identity(uint32_t n);
};

// Location of one byte.
struct ObjectLocation {
    uint32_t ost_ordinal = 0;   // index into the config's OST assignment
    uint64_t object_offset = 0; // bytes within that OST's object
    bool operator==(const ObjectLocation&) const = default;
};

// A contiguous run of bytes inside a single stripe unit on a single OST.
struct ChunkAddress {
    uint32_t ost_ordinal = 0;
    uint64_t object_offset = 0;
    uint64_t length = 0;
    bool operator==(const ChunkAddress&) const = default;
};

struct Fragment {
    uint64_t logical_offset = 0;
    ChunkAddress chunk;
    bool operator==(const Fragment&) const = default;
};

// Maps a logical byte offset to its target and object offset.
ObjectLocation map_offset(const StripingConfig& config, uint64_t offset);

// Cuts [offset, offset+length) into fragments, each maximal within one
// stripe unit, ordered by logical offset. Fragments are contiguous,
// non-overlapping, and cover the extent exactly; length 0 yields {}.
std::vector<Fragment> decompose_extent(const StripingConfig& config,
                                       uint64_t offset, uint64_t length);

} // namespace dstripe

#endif
