#pragma once

#include <cstdint>

namespace vtopo {

// Minimal PCG-XSH-RR 32-bit generator (the pcg32 reference variant:
// 64-bit LCG state, xorshift-high + random-rotate output). Deterministic
// across platforms; used everywhere reproducible randomness is needed.
class Pcg32 {
public:
    static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
    // Stream constant matching the reference implementation's demo seeding,
    // so (seed 42, stream 54) reproduces its published first outputs.
    static constexpr std::uint64_t kDefaultStream = 54;

    explicit Pcg32(std::uint64_t seed, std::uint64_t stream = kDefaultStream) {
        state_ = 0;
        inc_ = (stream << 1) | 1u;
        next();
        state_ += seed;
        next();
    }

    std::uint32_t next() {
        const std::uint64_t old = state_;
        state_ = old * kMultiplier + inc_;
        const auto xorshifted = static_cast<std::uint32_t>(((old >> 18) ^ old) >> 27);
        const auto rot = static_cast<std::uint32_t>(old >> 59);
        return (xorshifted >> rot) | (xorshifted << ((32 - rot) & 31));
    }

    // Uniform draw in [0, n) by rejection, so every value is equally likely.
    std::uint32_t bounded(std::uint32_t n) {
        const std::uint32_t threshold = (-n) % n;
        for (;;) {
            const std::uint32_t r = next();
            if (r >= threshold) return r % n;
        }
    }

private:
    std::uint64_t state_ = 0;
    std::uint64_t inc_ = 0;
};

} // namespace vtopo
