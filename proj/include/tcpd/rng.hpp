#pragma once

#include <cmath>
#include <cstdint>

namespace tcpd {

// Small deterministic generator (splitmix64 core) so sampled batches and
// weight initialization do not depend on the standard library's
// distribution implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound); bound > 0. Rejection-free Lemire reduction.
    uint64_t uniform_below(uint64_t bound) {
        // 128-bit multiply keeps the modulo bias below 2^-64
        const unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
        return static_cast<uint64_t>(m >> 64);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return (next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Box-Muller.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.28318530717958647692 * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

    // Independent stream for (seed, index) pairs, e.g. one per iteration.
    static Rng derive(uint64_t seed, uint64_t index) {
        Rng mix(seed ^ (0x9e3779b97f4a7c15ULL + index * 0xd1b54a32d192ed03ULL));
        mix.next_u64();
        return Rng(mix.next_u64());
    }

private:
    uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace tcpd
