#pragma once

#include <cstdint>
#include <string_view>

namespace taas::util {

/// Deterministic, platform-independent PRNG (splitmix64). Used instead of
/// <random> engines/distributions so that runs replay bit-identically on any
/// standard library.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(next() % n);
    }

    /// Independent stream derived from this seed and a tag.
    SplitMix64 derive(std::string_view tag) const {
        std::uint64_t h = 0xcbf29ce484222325ULL ^ state_;
        for (char c : tag) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        return SplitMix64(h);
    }

private:
    std::uint64_t state_;
};

} // namespace taas::util
