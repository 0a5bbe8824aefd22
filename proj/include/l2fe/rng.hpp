#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace l2fe {

// Deterministic random source. std::mt19937_64 output is pinned by the
// standard, and the uniform/normal transforms below avoid the
// implementation-defined std::*_distribution classes, so a given seed
// produces the same stream on every platform. Golden tests depend on this.
class SeededRng {
  public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound) by rejection, bias-free.
    std::uint64_t uniform_int(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t r = engine_();
        while (r >= limit) r = engine_();
        return r % bound;
    }

    // Standard normal via Box-Muller (cosine branch only, no cached state).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

  private:
    std::mt19937_64 engine_;
};

// splitmix64 finalizer, used to derive independent per-index streams from
// one master seed (trials, users, balls, ...).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace l2fe
