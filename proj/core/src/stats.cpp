#include "posverif/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "posverif/error.hpp"
#include "posverif/rng.hpp"

namespace posverif {

double Estimate::sigma() const noexcept {
    if (trials == 0) return 0;
    return std::sqrt(rate * (1 - rate) / static_cast<double>(trials));
}

Estimate wilson(std::size_t successes, std::size_t trials) {
    if (trials == 0) throw Error(Errc::InvalidTrials, "trials must be >= 1");
    if (successes > trials) throw Error(Errc::InvalidTrials, "more successes than trials");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = kWilsonZ * kWilsonZ;
    const double denom = 1 + z2 / n;
    const double centre = (p + z2 / (2 * n)) / denom;
    const double half = kWilsonZ * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
    Estimate e;
    e.successes = successes;
    e.trials = trials;
    e.rate = p;
    e.ci_low = std::max(0.0, std::min(p, centre - half));
    e.ci_high = std::min(1.0, std::max(p, centre + half));
    return e;
}

unsigned default_workers() {
    if (const char* env = std::getenv("POSVERIF_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::size_t count_successes(std::size_t trials, std::uint64_t master_seed,
                            const std::function<bool(std::uint64_t, std::size_t)>& trial, unsigned workers) {
    if (workers == 0) workers = default_workers();
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(trials, 1)));

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> hits{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&] {
        std::size_t local = 0;
        try {
            for (std::size_t i = next.fetch_add(1); i < trials; i = next.fetch_add(1))
                if (trial(trial_seed(master_seed, i), i)) ++local;
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(trials);
        }
        hits.fetch_add(local);
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return hits.load();
}

Estimate estimate(std::size_t trials, std::uint64_t master_seed,
                  const std::function<bool(std::uint64_t, std::size_t)>& trial, unsigned workers) {
    if (trials == 0) throw Error(Errc::InvalidTrials, "trials must be >= 1");
    return wilson(count_successes(trials, master_seed, trial, workers), trials);
}

}  // namespace posverif
