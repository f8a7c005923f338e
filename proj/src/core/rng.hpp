#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace segbed {

// Deterministic random source. std::mt19937_64 is fully specified by the
// standard, and every draw below is implemented on top of its raw 64-bit
// output, so sequences are bit-identical across platforms and compilers.
// (std::uniform_int_distribution is implementation-defined; never use it.)
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Unbiased integer in [0, n), n >= 1. Rejection sampling on the top
    // of the 64-bit range.
    std::uint64_t next_below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    // Inclusive integer range [lo, hi].
    std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(
                        next_below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    // Uniform in [0, 1) with 53-bit resolution.
    double next_double() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double next_double(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Standard normal via Box-Muller (deterministic, unlike
    // std::normal_distribution).
    double next_gaussian() {
        double u1;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Derive an independent stream (e.g. one per track or per worker).
    Rng fork(std::uint64_t salt) {
        return Rng(next_u64() ^ (salt * 0x9E3779B97F4A7C15ull));
    }

private:
    std::mt19937_64 engine_;
};

} // namespace segbed
