#pragma once

#include <cmath>
#include <cstdint>

#include "pit2crack/util.hpp"

namespace p2c {

/// splitmix64 generator (Steele, Lea & Flood; public-domain reference
/// constants). Chosen because the raw 64-bit stream is defined exactly by
/// the algorithm, so seeded runs replay bit-identically on any platform,
/// and independent streams can be derived cheaply for parallel sampling.
///
/// Manifests record the generator as algorithm "splitmix64", version "1.0".
class SplitMix64 {
public:
    static constexpr const char* kAlgorithm = "splitmix64";
    static constexpr const char* kVersion = "1.0";

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53 mantissa bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * next_double(); }

    /// Uniform integer in [lo, hi] inclusive, unbiased via rejection.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (lo >= hi) return lo;
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return lo + static_cast<std::int64_t>(v % span);
    }

    /// Standard normal via Box-Muller. Always consumes exactly two uniforms.
    double normal() {
        double u1;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    /// Log-normal parameterized by its median and the stddev of log(x).
    double lognormal(double median, double sigma_log) {
        return median * std::exp(sigma_log * normal());
    }

    /// Seed for the index-th independent stream of a stream family.
    /// Mixes (stream_seed, index) through one splitmix64 step so streams
    /// do not overlap for any practical sample count.
    static std::uint64_t derive_stream(std::uint64_t stream_seed, std::uint64_t index) {
        SplitMix64 g(stream_seed ^ (0x9E3779B97F4A7C15ull * (index + 1)));
        return g.next_u64();
    }

private:
    std::uint64_t state_;
};

} // namespace p2c
