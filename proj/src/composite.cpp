#include "dstripe/composite.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "dstripe/util.hpp"

namespace dstripe {

void CompositeLayout::validate() const {
    if (segments.empty())
        throw std::invalid_argument("CompositeLayout: no segments");
    if (segments.front().start != 0)
        throw std::invalid_argument("CompositeLayout: first segment must start at 0");
    for (size_t i = 0; i < segments.size(); ++i) {
        const SegmentSpec& s = segments[i];
        s.config.validate();
        const bool last = i + 1 == segments.size();
        if (last) {
            if (!s.unbounded())
                throw std::invalid_argument("CompositeLayout: last segment must be unbounded");
        } else {
            if (s.unbounded())
                throw std::invalid_argument("CompositeLayout: only the last segment may be unbounded");
            if (*s.end <= s.start)
                throw std::invalid_argument("CompositeLayout: empty segment");
            if (segments[i + 1].start != *s.end)
                throw std::invalid_argument("CompositeLayout: segments not contiguous");
        }
    }
}

const std::array<DirectoryType, 10>& directory_types() {
    static const std::array<DirectoryType, 10> types = {{
        {'A', {4, 1 * MiB}},
        {'B', {8, 1 * MiB}},
        {'C', {16, 1 * MiB}},
        {'D', {64, 1 * MiB}},
        {'E', {4, 2 * MiB}},
        {'F', {16, 2 * MiB}},
        {'G', {64, 2 * MiB}},
        {'H', {4, 4 * MiB}},
        {'I', {16, 4 * MiB}},
        {'J', {64, 4 * MiB}},
    }};
    return types;
}

const DirectoryType& directory_type(char letter) {
    for (const DirectoryType& t : directory_types())
        if (t.letter == letter) return t;
    throw std::invalid_argument(std::string("unknown directory type '") + letter + "'");
}

std::string dir_label_for(const StripingConfig& config) {
    std::ostringstream os;
    os << config.stripe_count << "ost-" << format_size_label(config.stripe_width);
    return os.str();
}

CompositeLayout build_layout(const std::vector<Watermark>& watermarks,
                             const std::vector<StripingConfig>& configs) {
    if (configs.empty())
        throw std::invalid_argument("build_layout: configs must be nonempty");
    if (configs.size() != watermarks.size() + 1)
        throw std::invalid_argument("build_layout: need |watermarks|+1 configs");
    for (size_t i = 0; i < watermarks.size(); ++i) {
        if (watermarks[i].boundary == 0)
            throw std::invalid_argument("build_layout: watermark boundary must be > 0");
        if (i > 0 && watermarks[i].boundary <= watermarks[i - 1].boundary)
            throw std::invalid_argument("build_layout: watermarks must be strictly ascending");
    }

    CompositeLayout layout;
    uint64_t start = 0;
    for (size_t i = 0; i < configs.size(); ++i) {
        configs[i].validate();
        SegmentSpec seg;
        seg.start = start;
        if (i < watermarks.size()) {
            seg.end = watermarks[i].boundary;
            start = watermarks[i].boundary;
        }
        seg.config = configs[i];
        seg.dir_label = dir_label_for(configs[i]);
        layout.segments.push_back(std::move(seg));
    }
    layout.validate();
    return layout;
}

CompositeLayout build_layout_from_types(const std::vector<Watermark>& watermarks,
                                        const std::string& letters) {
    std::vector<StripingConfig> configs;
    configs.reserve(letters.size());
    for (char c : letters) configs.push_back(directory_type(c).config);
    return build_layout(watermarks, configs);
}

SegmentPosition resolve(const CompositeLayout& layout, uint64_t offset) {
    // first segment whose start is > offset, minus one
    const auto& segs = layout.segments;
    size_t lo = 0, hi = segs.size();
    while (lo + 1 < hi) {
        const size_t mid = (lo + hi) / 2;
        if (segs[mid].start <= offset)
            lo = mid;
        else
            hi = mid;
    }
    return SegmentPosition{lo, offset - segs[lo].start};
}

std::vector<SubRange> split_range(const CompositeLayout& layout,
                                  uint64_t offset, uint64_t length) {
    std::vector<SubRange> out;
    uint64_t pos = offset;
    uint64_t remaining = length;
    while (remaining > 0) {
        const SegmentPosition at = resolve(layout, pos);
        const SegmentSpec& seg = layout.segments[at.segment_index];
        uint64_t take = remaining;
        if (seg.end)
            take = std::min(take, *seg.end - pos);
        out.push_back(SubRange{at.segment_index, at.offset_in_segment, take});
        pos += take;
        remaining -= take;
    }
    return out;
}

std::vector<LayoutFragment> full_decompose(const CompositeLayout& layout,
                                           const OstPool& pool,
                                           uint64_t offset, uint64_t length) {
    pool.validate();
    for (const SegmentSpec& seg : layout.segments)
        if (seg.config.stripe_count > pool.num_osts)
            throw std::invalid_argument("full_decompose: stripe_count exceeds pool size");

    std::vector<LayoutFragment> out;
    for (const SubRange& sr : split_range(layout, offset, length)) {
        const SegmentSpec& seg = layout.segments[sr.segment_index];
        for (const Fragment& frag :
             decompose_extent(seg.config, sr.offset_in_segment, sr.length)) {
            out.push_back(LayoutFragment{sr.segment_index,
                                         seg.start + frag.logical_offset, frag.chunk});
        }
    }
    return out;
}

} // namespace dstripe
