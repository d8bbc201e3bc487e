#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "lobmm/types.hpp"

namespace lobmm {

// Counter-based splittable generator: each (seed, replicate, day) triple keys
// an independent splitmix64 stream, so replicates are reproducible under any
// parallel schedule.
class SplitRng {
public:
    SplitRng(std::uint64_t seed, std::uint64_t replicate, std::uint64_t day);

    std::uint64_t next_u64();
    double next_double();                     // uniform in [0, 1)
    std::uint64_t next_below(std::uint64_t n);  // uniform in [0, n), unbiased
    double next_gaussian();                   // standard normal (polar method)
    double next_exponential(double rate);
    int next_poisson(double mean);

private:
    std::uint64_t state_;
};

struct ReplicatePlan {
    std::uint64_t seed = 0;
    int n_replicates = 1;
    std::vector<std::int64_t> days;  // scope, by day id
};

// Same-size with-replacement resample. Drawn orders keep their original
// timestamps; the output is re-sorted by (timestamp, id) and given fresh ids.
// Throws on an empty partition.
DayPartition resample_day(const DayPartition& partition, SplitRng& rng);

template <typename T>
struct ReplicateOutcome {
    int index = 0;
    bool ok = false;
    std::string error;
    T value{};
};

// Runs `pipeline(replicate_index, resampled_days)` for every replicate, in
// parallel, returning outcomes in index order. A throwing replicate is
// recorded as failed without aborting its siblings.
template <typename Pipeline>
auto run_replicates(const ReplicatePlan& plan, std::span<const DayPartition> days,
                    Pipeline&& pipeline) {
    using Value = decltype(pipeline(0, std::declval<const std::vector<DayPartition>&>()));
    std::vector<ReplicateOutcome<Value>> outcomes(static_cast<std::size_t>(plan.n_replicates));

    auto run_one = [&](int rep) {
        auto& outcome = outcomes[static_cast<std::size_t>(rep)];
        outcome.index = rep;
        try {
            std::vector<DayPartition> resampled;
            resampled.reserve(days.size());
            for (std::size_t d = 0; d < days.size(); ++d) {
                // An empty scope means every day; RNG streams are keyed by
                // position so the scope does not shift sibling streams.
                if (!plan.days.empty() &&
                    std::find(plan.days.begin(), plan.days.end(), days[d].day) == plan.days.end())
                    continue;
                SplitRng rng(plan.seed, static_cast<std::uint64_t>(rep), static_cast<std::uint64_t>(d));
                resampled.push_back(resample_day(days[d], rng));
            }
            outcome.value = pipeline(rep, resampled);
            outcome.ok = true;
        } catch (const std::exception& e) {
            outcome.error = e.what();
        }
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_threads =
        std::min<unsigned>(hw, static_cast<unsigned>(plan.n_replicates));
    if (n_threads <= 1) {
        for (int rep = 0; rep < plan.n_replicates; ++rep) run_one(rep);
    } else {
        std::vector<std::thread> workers;
        for (unsigned w = 0; w < n_threads; ++w) {
            workers.emplace_back([&, w] {
                for (int rep = static_cast<int>(w); rep < plan.n_replicates;
                     rep += static_cast<int>(n_threads))
                    run_one(rep);
            });
        }
        for (auto& t : workers) t.join();
    }
    return outcomes;
}

}  // namespace lobmm
