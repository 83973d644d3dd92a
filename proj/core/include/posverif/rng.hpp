#pragma once

#include <cstdint>

namespace posverif {

/// SplitMix64 (Steele, Lea, Flood 2014). All randomness in the library flows
/// through this generator so that results are identical on every platform.
///
/// Seeding convention: a generator constructed with seed `s` starts with
/// internal state `s`; each draw adds 0x9E3779B97F4A7C15 and returns the
/// finalized state.
class SplitMix64 {
public:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    explicit constexpr SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    constexpr std::uint64_t next() noexcept {
        state_ += kGamma;
        return mix(state_);
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound). Rejection sampling, so no modulo bias.
    std::uint64_t below(std::uint64_t bound) noexcept;

    /// Uniform `width`-bit value, width <= 64.
    std::uint64_t bits(unsigned width) noexcept {
        if (width == 0) return 0;
        const std::uint64_t v = next();
        return width >= 64 ? v : (v & ((std::uint64_t{1} << width) - 1));
    }

    bool coin() noexcept { return (next() >> 63) != 0; }

    /// Independent child stream. `label` separates streams forked from the
    /// same parent state.
    SplitMix64 fork(std::uint64_t label) const noexcept {
        return SplitMix64(mix(state_ ^ mix(label + kGamma)));
    }

    std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_;
};

/// Per-trial seed split: trial `i` of a run with master seed `m` uses
/// mix(m + (i + 1) * gamma). Independent of worker scheduling.
constexpr std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return SplitMix64::mix(master + (index + 1) * SplitMix64::kGamma);
}

}  // namespace posverif
