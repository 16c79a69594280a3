#pragma once

#include <cstdint>
#include <cmath>

#include "adgi/vec.hpp"

namespace adgi {

// PCG32 (O'Neill). Small, fast, and reproducible across platforms, which the
// determinism contract needs; <random> distributions are not bit-stable
// between standard library implementations.
struct Pcg32 {
    uint64_t state = 0x853c49e6748fea9bULL;
    uint64_t inc = 0xda3e39cb94b95bdbULL;

    Pcg32() = default;
    Pcg32(uint64_t seed, uint64_t stream) { reseed(seed, stream); }

    void reseed(uint64_t seed, uint64_t stream) {
        state = 0;
        inc = (stream << 1u) | 1u;
        nextUInt();
        state += seed;
        nextUInt();
    }

    uint32_t nextUInt() {
        uint64_t old = state;
        state = old * 6364136223846793005ULL + inc;
        uint32_t xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
        uint32_t rot = static_cast<uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    // Bounded, unbiased (rejection).
    uint32_t nextUInt(uint32_t bound) {
        uint32_t threshold = (0u - bound) % bound;
        for (;;) {
            uint32_t r = nextUInt();
            if (r >= threshold) return r % bound;
        }
    }

    float nextFloat() { // [0,1)
        return static_cast<float>(nextUInt() >> 8) * 0x1p-24f;
    }

    double nextDouble() { // [0,1)
        uint64_t hi = nextUInt(), lo = nextUInt();
        return static_cast<double>((hi << 21) ^ lo) * 0x1p-53;
    }

    float uniform(float lo, float hi) { return lo + (hi - lo) * nextFloat(); }

    // Box-Muller without state carry; one call burns two variates so chains
    // stay reproducible regardless of how many gaussians a step consumes.
    float gaussian() {
        float u1 = 1.f - nextFloat(); // (0,1]
        float u2 = nextFloat();
        return std::sqrt(-2.f * std::log(u1)) * std::cos(6.28318530718f * u2);
    }

    Vec3 uniformSphere() {
        float z = 1.f - 2.f * nextFloat();
        float r = std::sqrt(std::max(0.f, 1.f - z * z));
        float phi = 6.28318530718f * nextFloat();
        return {r * std::cos(phi), r * std::sin(phi), z};
    }
};

static inline uint64_t splitMix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Named sub-streams hanging off the one master seed. Every consumer derives
// its generator through here; nothing else seeds randomness.
enum class RngStream : uint64_t {
    Scene = 1,
    StaticChains = 2,
    PilotRays = 3,
    DynamicChains = 4,
    Qddgi = 5,
    Reference = 6,
};

static inline Pcg32 makeRng(uint64_t seed, RngStream s, uint64_t a = 0, uint64_t b = 0) {
    uint64_t h = splitMix64(seed ^ splitMix64(static_cast<uint64_t>(s)));
    h = splitMix64(h ^ splitMix64(a * 0x9e3779b97f4a7c15ULL + 1));
    uint64_t stream = splitMix64(h ^ (b + 0x632be59bd9b4e019ULL));
    return Pcg32(h, stream);
}

} // namespace adgi
