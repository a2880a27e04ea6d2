#pragma once

#include <cstdint>

namespace pe {

// splitmix64 stream. Hand-rolled so that sequences are identical across
// platforms and standard-library versions; simulation reproducibility
// depends on it.
struct Rng {
    std::uint64_t state = 0;

    Rng() = default;
    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [-1, 1)
    double next_symmetric() { return 2.0 * next_unit() - 1.0; }

    // uniform in [lo, hi)
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    // Derives an independent stream; used to give parallel sweep iterations
    // schedule-independent randomness.
    Rng fork(std::uint64_t salt) const {
        Rng r(state ^ (0x9e3779b97f4a7c15ull * (salt + 0x632be59bd9b4e019ull)));
        r.next_u64();
        return r;
    }
};

}  // namespace pe
