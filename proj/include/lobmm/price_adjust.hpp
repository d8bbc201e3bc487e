#pragma once

#include <span>
#include <vector>

#include "lobmm/bootstrap.hpp"
#include "lobmm/mm_sim.hpp"
#include "lobmm/types.hpp"

namespace lobmm {

struct ElasticityEstimate {
    std::vector<double> xi;          // per day t (aligned with mids[0..n-2])
    std::vector<bool> degenerate;    // xi carried forward from the previous fit
    double r_squared = 0.0;          // of the most recent fit
    int window = 0;
    std::size_t n = 0;
};

// Rolling OLS slope of the daily mid change on the end-of-day imbalance
// Q^b - Q^a over the trailing `window` days; early days are backfilled with
// the first available fit, and a zero-variance window carries the previous
// slope forward. window == full sample reduces to a single global fit.
ElasticityEstimate estimate_elasticity(std::span<const double> daily_mids,
                                       std::span<const double> daily_imbalances, int window);

enum class NoiseMode { deterministic, resample_residuals };

struct AdjustedSeries {
    std::vector<double> s_hat;  // counterfactual mid chain
    std::vector<double> s_ref;  // the same chain driven by baseline imbalances
    std::vector<double> scale;  // s_hat / s_ref, per day
};

// s_hat[0] = s_ref[0] = s[0];
// s_hat[t+1] = s_hat[t] + xi[t] * mm_imbalance[t] (+ eps),
// s_ref[t+1] = s_ref[t] + xi[t] * baseline_imbalance[t].
// In deterministic mode equal imbalances give scale == 1 exactly. In
// resample_residuals mode eps is drawn with replacement from `residuals`.
// Throws on misaligned series.
AdjustedSeries adjusted_chain(std::span<const double> baseline_mids,
                              std::span<const double> baseline_imbalances,
                              std::span<const double> mm_imbalances,
                              std::span<const double> xi, NoiseMode mode,
                              std::span<const double> residuals = {}, SplitRng* rng = nullptr);

// p_hat = p * s_hat / s; volumes and signs unchanged. Throws when s == 0.
std::vector<OrderRecord> rescale_prices(std::span<const OrderRecord> orders, double s,
                                        double s_hat);

struct A4Config {
    std::size_t insertion_day = 0;  // index into the day sequence; >= size means no intervention
    int post_data_days = 15;        // bootstrap-simulated days after the data ends
    SimConfig sim;                  // quote parameters, quote size, expiry
    int elasticity_window = 30;
    NoiseMode noise = NoiseMode::deterministic;
    std::uint64_t seed = 0;
};

struct A4DayRow {
    std::int64_t day = 0;
    double s = 0.0;      // baseline end-of-day mid (chain reference)
    double s_hat = 0.0;
    double scale = 1.0;
    double q_bid = 0.0;  // with-MM end-of-day totals
    double q_ask = 0.0;
    double xi = 0.0;
};

struct A4Result {
    AdjustedSeries series;
    std::vector<A4DayRow> rows;
    MMState mm;
};

// The counterfactual loop: from insertion_day on, each day computes MM quotes
// around the current adjusted mid, intercepts crossing orders (flow-cross
// rule), replays the remainder through the with-MM book, advances the
// adjusted chain from the end-of-day imbalance, and rescales the next day's
// order prices. Days past the dataset end replay bootstrap resamples of the
// final day.
A4Result run_a4_loop(std::span<const DayPartition> days, const A4Config& config);

}  // namespace lobmm
