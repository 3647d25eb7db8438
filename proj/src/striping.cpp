#include "dstripe/striping.hpp"

#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace dstripe {

void StripingConfig::validate() const {
    if (stripe_count < 1)
        throw std::invalid_argument("StripingConfig: stripe_count must be >= 1");
    if (stripe_width < 1)
        throw std::invalid_argument("StripingConfig: stripe_width must be >= 1");
}

void OstPool::validate() const {
    if (num_osts < 1)
        throw std::invalid_argument("OstPool: num_osts must be >= 1");
    if (ost_ids.size() != num_osts)
        throw std::invalid_argument("OstPool: ost_ids length != num_osts");
    std::unordered_set<uint32_t> seen;
    for (uint32_t id : ost_ids)
        if (!seen.insert(id).second)
            throw std::invalid_argument("OstPool: duplicate ost id");
}

OstPool OstPool::identity(uint32_t n) {
    OstPool p;
    p.num_osts = n;
    p.ost_ids.resize(n);
    for (uint32_t i = 0; i < n; ++i) p.ost_ids[i] = i;
    return p;
}

ObjectLocation map_offset(const StripingConfig& config, uint64_t offset) {
    const uint64_t stripe_idx = offset / config.stripe_width;
    ObjectLocation loc;
    loc.ost_ordinal = static_cast<uint32_t>(stripe_idx % config.stripe_count);
    loc.object_offset = (stripe_idx / config.stripe_count) * config.stripe_width +
                        offset % config.stripe_width;
    return loc;
}

std::vector<Fragment> decompose_extent(const StripingConfig& config,
                                       uint64_t offset, uint64_t length) {
    config.validate();
    if (length > std::numeric_limits<uint64_t>::max() - offset)
        throw std::invalid_argument("decompose_extent: extent overflows");

    std::vector<Fragment> out;
    uint64_t pos = offset;
    uint64_t remaining = length;
    while (remaining > 0) {
        const uint64_t within = pos % config.stripe_width;
        const uint64_t take = std::min(remaining, config.stripe_width - within);
        const ObjectLocation loc = map_offset(config, pos);
        out.push_back(Fragment{pos, ChunkAddress{loc.ost_ordinal, loc.object_offset, take}});
        pos += take;
        remaining -= take;
    }
    return out;
}

} // namespace dstripe
