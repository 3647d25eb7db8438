#include <doctest.h>

#include <set>
#include <vector>

#include "dstripe/rng.hpp"
#include "dstripe/striping.hpp"
#include "dstripe/util.hpp"

using namespace dstripe;

namespace {

// Brute-force striping oracle: walks the logical byte space from zero,
// assigning every byte to (ost, object byte) by counting, with no division
// shortcuts. Independent of map_offset.
struct ByteWalkOracle {
    explicit ByteWalkOracle(const StripingConfig& cfg)
        : config(cfg), next_object_byte(cfg.stripe_count, 0) {}

    // location of the byte at the current walk position, then advance
    ObjectLocation step() {
        ObjectLocation loc{current_ost, next_object_byte[current_ost]};
        next_object_byte[current_ost]++;
        if (++pos_in_stripe == config.stripe_width) {
            pos_in_stripe = 0;
            current_ost = (current_ost + 1) % config.stripe_count;
        }
        return loc;
    }

    StripingConfig config;
    uint32_t current_ost = 0;
    uint64_t pos_in_stripe = 0;
    std::vector<uint64_t> next_object_byte;
};

} // namespace

TEST_CASE("map_offset zero and identity cases") {
    const StripingConfig four{4, 1 * MiB};
    CHECK(map_offset(four, 0) == ObjectLocation{0, 0});

    const StripingConfig one{1, 1 * MiB};
    for (uint64_t x : {uint64_t(0), uint64_t(1), uint64_t(123456), 10 * MiB + 17, 3 * GiB + 5})
        CHECK(map_offset(one, x) == ObjectLocation{0, x});
}

TEST_CASE("map_offset agrees with the byte-walk oracle") {
    for (const StripingConfig& cfg :
         {StripingConfig{3, 4}, StripingConfig{4, 7}, StripingConfig{2, 1},
          StripingConfig{5, 16}, StripingConfig{1, 3}}) {
        ByteWalkOracle oracle(cfg);
        for (uint64_t off = 0; off < 4096; ++off) {
            const ObjectLocation expect = oracle.step();
            const ObjectLocation got = map_offset(cfg, off);
            REQUIRE(got == expect);
        }
    }
}

TEST_CASE("map_offset mid-stripe example from the oracle") {
    // (count=4, width=1 MiB, offset=5 MiB + 3): frozen from the byte walk
    const StripingConfig cfg{4, 1 * MiB};
    CHECK(map_offset(cfg, 5 * MiB + 3) == ObjectLocation{1, 1 * MiB + 3});
}

TEST_CASE("map_offset is injective over a sampled range") {
    const StripingConfig cfg{4, 1 * MiB};
    std::set<std::pair<uint32_t, uint64_t>> seen;
    for (uint64_t off = 0; off < 64 * MiB; off += 4093) {
        const ObjectLocation loc = map_offset(cfg, off);
        CHECK(seen.insert({loc.ost_ordinal, loc.object_offset}).second);
    }
}

TEST_CASE("decompose_extent trivial cases") {
    const StripingConfig cfg{4, 1 * MiB};
    CHECK(decompose_extent(cfg, 0, 0).empty());
    CHECK(decompose_extent(cfg, 5 * MiB, 0).empty());

    const auto frags = decompose_extent(cfg, 0, 4 * MiB);
    REQUIRE(frags.size() == 4);
    for (uint32_t i = 0; i < 4; ++i) {
        CHECK(frags[i].logical_offset == uint64_t(i) * MiB);
        CHECK(frags[i].chunk == ChunkAddress{i, 0, 1 * MiB});
    }
}

TEST_CASE("decompose_extent splits an unaligned extent") {
    // (count=2, width=1 MiB, offset=1.5 MiB, length=1 MiB)
    const StripingConfig cfg{2, 1 * MiB};
    const auto frags = decompose_extent(cfg, MiB + MiB / 2, 1 * MiB);
    REQUIRE(frags.size() == 2);
    CHECK(frags[0].logical_offset == MiB + MiB / 2);
    CHECK(frags[0].chunk == ChunkAddress{1, MiB / 2, MiB / 2});
    CHECK(frags[1].logical_offset == 2 * MiB);
    CHECK(frags[1].chunk == ChunkAddress{0, 1 * MiB, MiB / 2});
}

TEST_CASE("decompose_extent fragments agree with map_offset byte by byte") {
    Rng rng(42);
    for (int iter = 0; iter < 50; ++iter) {
        const StripingConfig cfg{static_cast<uint32_t>(rng.uniform_u64(1, 6)),
                                 rng.uniform_u64(1, 64)};
        const uint64_t offset = rng.uniform_u64(0, 1000);
        const uint64_t length = rng.uniform_u64(0, 500);
        const auto frags = decompose_extent(cfg, offset, length);

        // coverage: contiguous, sorted, exact
        uint64_t pos = offset;
        uint64_t total = 0;
        for (const Fragment& f : frags) {
            CHECK(f.logical_offset == pos);
            CHECK(f.chunk.length >= 1);
            // fragment never crosses a stripe-width boundary
            CHECK(f.logical_offset / cfg.stripe_width ==
                  (f.logical_offset + f.chunk.length - 1) / cfg.stripe_width);
            for (uint64_t i = 0; i < f.chunk.length; ++i) {
                const ObjectLocation loc = map_offset(cfg, f.logical_offset + i);
                REQUIRE(loc.ost_ordinal == f.chunk.ost_ordinal);
                REQUIRE(loc.object_offset == f.chunk.object_offset + i);
            }
            pos += f.chunk.length;
            total += f.chunk.length;
        }
        CHECK(total == length);
    }
}

TEST_CASE("round-robin balance for aligned whole rotations") {
    for (const StripingConfig& cfg : {StripingConfig{4, 1 * MiB}, StripingConfig{8, 2 * MiB},
                                      StripingConfig{3, 12345}}) {
        const uint64_t rotations = 5;
        const uint64_t length = rotations * cfg.stripe_count * cfg.stripe_width;
        std::vector<uint64_t> per_ost(cfg.stripe_count, 0);
        for (const Fragment& f : decompose_extent(cfg, 0, length))
            per_ost[f.chunk.ost_ordinal] += f.chunk.length;
        for (uint64_t bytes : per_ost) CHECK(bytes == length / cfg.stripe_count);
    }
}

TEST_CASE("config and pool validation") {
    CHECK_THROWS_AS((StripingConfig{0, 1}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((StripingConfig{1, 0}.validate()), std::invalid_argument);

    OstPool dup;
    dup.num_osts = 2;
    dup.ost_ids = {3, 3};
    CHECK_THROWS_AS(dup.validate(), std::invalid_argument);

    OstPool short_pool;
    short_pool.num_osts = 3;
    short_pool.ost_ids = {0, 1};
    CHECK_THROWS_AS(short_pool.validate(), std::invalid_argument);

    CHECK_NOTHROW(OstPool::identity(8).validate());
}
