#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace posverif {

/// Binomial estimate with a Wilson 95% score interval.
struct Estimate {
    std::size_t successes = 0;
    std::size_t trials = 0;
    double rate = 0;
    double ci_low = 0;
    double ci_high = 0;

    /// Plug-in binomial standard error sqrt(r(1-r)/N).
    double sigma() const noexcept;
    bool covers(double p) const noexcept { return ci_low <= p && p <= ci_high; }
};

inline constexpr double kWilsonZ = 1.959963984540054;

/// Throws InvalidTrials when trials == 0.
Estimate wilson(std::size_t successes, std::size_t trials);

/// Runs `trial(trial_seed(master, i), i)` for i in [0, trials) across
/// `workers` threads (0 = hardware concurrency) and counts true results.
/// The count does not depend on scheduling.
std::size_t count_successes(std::size_t trials, std::uint64_t master_seed,
                            const std::function<bool(std::uint64_t seed, std::size_t index)>& trial,
                            unsigned workers = 0);

/// count_successes followed by wilson.
Estimate estimate(std::size_t trials, std::uint64_t master_seed,
                  const std::function<bool(std::uint64_t seed, std::size_t index)>& trial, unsigned workers = 0);

/// Default worker count: POSVERIF_THREADS if set, else hardware concurrency.
unsigned default_workers();

}  // namespace posverif
