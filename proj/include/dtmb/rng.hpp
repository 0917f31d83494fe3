#pragma once

#include <cstdint>

namespace dtmb {

/// SplitMix64 (Steele, Lea & Flood 2014). The project's one and only PRNG:
/// 64-bit wrapping arithmetic, so sequences are bit-identical on every
/// platform. next() returns finalize(state += 0x9e3779b97f4a7c15).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53 random bits.
    double next_unit() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n), unbiased (rejection on the 2^64 mod n tail).
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t x = next();
            if (x >= threshold) return x % n;
        }
    }

private:
    std::uint64_t state_;
};

/// Seed of substream `index` under `master`: the (index+1)-th output of
/// SplitMix64(master). Random access, so trials can be generated in any
/// order (or in parallel) without changing any individual stream.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + (index + 1) * 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace dtmb
