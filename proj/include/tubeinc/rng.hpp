#pragma once

#include <cstdint>

namespace tubeinc {

// Small counter-based generator (splitmix64 core). Streams are derived from
// (seed, cell indices) so per-cell generation is reproducible regardless of
// evaluation order; std distributions are avoided because their output is
// implementation-defined.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(mix(seed ^ 0x9e3779b97f4a7c15ull)) {}

    static Rng for_cell(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
        uint64_t s = mix(seed + 0x9e3779b97f4a7c15ull);
        s = mix(s ^ (a + 0xbf58476d1ce4e5b9ull));
        s = mix(s ^ (b + 0x94d049bb133111ebull));
        s = mix(s ^ (c + 0xd6e8feb86659fd93ull));
        return Rng(s, 0);
    }

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    // Uniform in [0, 1).
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

private:
    Rng(uint64_t s, int) : state_(s) {}
    static uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    uint64_t state_;
};

}  // namespace tubeinc
