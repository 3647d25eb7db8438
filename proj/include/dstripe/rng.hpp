#ifndef DSTRIPE_RNG_HPP
#define DSTRIPE_RNG_HPP

#include <cstdint>

namespace dstripe {

// splitmix64. Small, fast, and the output stream is identical on every
// platform, which keeps generated traces and result files reproducible.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // inclusive bounds
    uint64_t uniform_u64(uint64_t lo, uint64_t hi) {
        if (hi <= lo) return lo;
        return lo + next() % (hi - lo + 1);
    }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // derive an independent stream, e.g. one per repetition
    static uint64_t mix(uint64_t seed, uint64_t salt) {
        Rng r(seed ^ (salt * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL));
        return r.next();
    }

private:
    uint64_t state_;
};

} // namespace dstripe

#endif
