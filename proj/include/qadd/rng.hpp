#pragma once

#include <cmath>
#include <cstdint>

namespace qadd {

/// Counter-based deterministic generator: output i of stream `seed` is a
/// fixed mixing function of (seed, i). Identical (seed, counter) gives
/// identical bits on every platform, and streams can be split by offsetting
/// the counter without sharing state.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t counter = 0)
        : seed_(seed), counter_(counter) {}

    std::uint64_t next_u64() {
        std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * (++counter_);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0,1).
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (one value per call, no caching, so the
    /// stream position stays a pure function of the call count).
    double next_gaussian() {
        double u1 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

}  // namespace qadd
