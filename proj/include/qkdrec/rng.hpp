#pragma once

#include <cstdint>
#include <string_view>

namespace qkdrec {

// xoshiro256** with splitmix64 seeding. Self-contained so that every draw is
// bit-identical across platforms and standard-library versions; the experiment
// determinism contract depends on that.
class Rng {
   public:
    explicit Rng(uint64_t seed) { reseed(seed); }

    void reseed(uint64_t seed) {
        uint64_t x = seed;
        for (auto &w : state_) {
            w = splitmix64(x);
        }
    }

    uint64_t next_u64() {
        uint64_t *s = state_;
        uint64_t result = rotl(s[1] * 5, 7) * 9;
        uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool next_bit() { return (next_u64() >> 63) != 0; }

    // Unbiased integer in [0, bound) (Lemire rejection method).
    uint64_t next_below(uint64_t bound) {
        uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        auto lo = static_cast<uint64_t>(m);
        if (lo < bound) {
            uint64_t threshold = -bound % bound;
            while (lo < threshold) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * bound;
                lo = static_cast<uint64_t>(m);
            }
        }
        return static_cast<uint64_t>(m >> 64);
    }

    static uint64_t splitmix64(uint64_t &x) {
        uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

   private:
    static uint64_t rotl(uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    uint64_t state_[4];
};

// Documented stream-split rule: the seed of substream (a, b) under a master
// seed is splitmix64 applied to the chained mixes of (master, a, b). Trials
// use derive_seed(master, grid_point_index, trial_index).
inline uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b = 0) {
    uint64_t x = master;
    uint64_t h = Rng::splitmix64(x);
    x = h ^ a;
    h = Rng::splitmix64(x);
    x = h ^ b;
    return Rng::splitmix64(x);
}

// Named substreams (code construction, interleavers, ...) hash the tag bytes.
inline uint64_t derive_seed(uint64_t master, std::string_view tag, uint64_t b = 0) {
    uint64_t x = master;
    for (char c : tag) {
        x = Rng::splitmix64(x) ^ static_cast<uint64_t>(static_cast<unsigned char>(c));
    }
    uint64_t h = Rng::splitmix64(x);
    x = h ^ b;
    return Rng::splitmix64(x);
}

}  // namespace qkdrec
