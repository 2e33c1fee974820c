#pragma once

#include <cstdint>

namespace dpotts {

// splitmix64 (Vigna). Used to seed streams and to derive child seeds.
struct SplitMix64 {
    uint64_t state;
    explicit SplitMix64(uint64_t seed) : state(seed) {}
    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
};

inline uint64_t mix64(uint64_t x) { return SplitMix64(x).next(); }

// Deterministic child seed from a master seed and up to three stream keys.
// Every disorder sample, replica and analysis stage gets its own stream so
// results are reproducible independent of scheduling.
inline uint64_t derive_seed(uint64_t master, uint64_t k1, uint64_t k2 = 0,
                            uint64_t k3 = 0) {
    uint64_t h = mix64(master ^ 0x9e3779b97f4a7c15ull);
    h = mix64(h ^ k1);
    h = mix64(h ^ k2);
    h = mix64(h ^ k3);
    return h;
}

// xoshiro256** (Blackman/Vigna), public domain reference implementation.
struct Xoshiro256 {
    uint64_t s[4];

    explicit Xoshiro256(uint64_t seed = 1) {
        SplitMix64 sm(seed);
        for (auto& w : s) w = sm.next();
    }

    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t next() {
        const uint64_t result = rotl(s[1] * 5, 7) * 9;
        const uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }

    // uniform in [0,1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform in [0,n) without modulo bias (Lemire)
    uint32_t below(uint32_t n) {
        return static_cast<uint32_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
    }
};

}  // namespace dpotts
