#pragma once

#include <cmath>
#include <cstdint>

namespace eakd {

// PCG32 (XSH-RR 64/32). Every random draw in the toolkit comes from one of
// these, keyed by (seed, stream), so runs are reproducible bit for bit.
class Pcg32 {
public:
    Pcg32(std::uint64_t seed, std::uint64_t stream) {
        state_ = 0u;
        inc_ = (stream << 1u) | 1u;
        next_u32();
        state_ += seed;
        next_u32();
    }

    std::uint32_t next_u32() {
        const std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        const std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        const std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    // Unbiased integer in [0, bound).
    std::uint32_t next_below(std::uint32_t bound) {
        const std::uint32_t threshold = (-bound) % bound;
        for (;;) {
            const std::uint32_t r = next_u32();
            if (r >= threshold) return r % bound;
        }
    }

    // 53-bit uniform in [0, 1).
    double next_double() {
        const std::uint64_t a = next_u32() >> 5u;  // 27 bits
        const std::uint64_t b = next_u32() >> 6u;  // 26 bits
        return (static_cast<double>(a) * 67108864.0 + static_cast<double>(b)) / 9007199254740992.0;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Box-Muller with a cached spare.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - next_double();  // (0, 1], keeps log finite
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::uint64_t state_ = 0;
    std::uint64_t inc_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Stream ids. Separate streams keep parameter init, data generation, and
// shuffling independent of one another for a given seed.
namespace rng_stream {
constexpr std::uint64_t init = 1;
constexpr std::uint64_t blob_centers = 2;
constexpr std::uint64_t blob_samples = 3;
constexpr std::uint64_t shuffle = 4;
} // namespace rng_stream

} // namespace eakd
