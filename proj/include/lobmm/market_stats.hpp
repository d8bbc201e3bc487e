#pragma once

#include <span>
#include <vector>

#include "lobmm/lob_engine.hpp"
#include "lobmm/types.hpp"

namespace lobmm {

struct Ohlc {
    double open = 0.0, high = 0.0, low = 0.0, close = 0.0;
};

struct DailyStats {
    std::int64_t day = 0;
    std::optional<Ohlc> ohlc;  // over execution prices; absent when no trades
    double executed_volume = 0.0;
    double submitted_volume = 0.0;
    std::optional<double> execution_ratio;  // executed / submitted
    std::optional<double> mean_relative_spread;
    std::optional<double> mean_relative_distance_bid;
    std::optional<double> mean_relative_distance_ask;
};

// executions/snapshots must come from replaying exactly this partition.
DailyStats daily_stats(const DayPartition& partition, std::span<const Execution> executions,
                       std::span<const BookSnapshot> snapshots);

struct ExpFit {
    double rate = 0.0;  // 1 / sample mean (maximum likelihood)
    std::size_t n = 0;
    double ks_stat = 0.0;  // KS distance against Exp(rate)
};

// Throws std::invalid_argument on n < 2 or any nonpositive sample.
ExpFit fit_exponential(std::span<const double> samples);

enum class Side { bid, ask };

struct VolumeProfile {
    Side side = Side::bid;
    std::vector<double> edges;  // bucket boundaries over relative distance d/m
    std::vector<double> mean_relative_volume;  // per bucket, averaged over snapshots
};

// Per snapshot: resting volume per relative-distance bucket, normalized by the
// side's total volume; the profile is the mean over snapshots with a nonempty
// side and a defined mid. Throws if no snapshot qualifies or edges are bad.
VolumeProfile volume_profile(std::span<const BookSnapshot> snapshots, Side side,
                             std::span<const double> edges);

// Survival function 1 - CDF evaluated at the sorted unique sample points.
std::vector<std::pair<double, double>> ecdf_tail(std::span<const double> sizes);

struct ImpactFit {
    double K = 0.0;  // slope of binned mean response on ln Q
    double intercept = 0.0;
    double r_squared = 0.0;
    int tau = 0;                           // lag, in snapshot events
    std::vector<double> bin_log_size;      // per nonempty bin, mean ln Q
    std::vector<double> bin_mean_response; // per nonempty bin
    std::vector<std::size_t> bin_count;
};

struct ImpactSample {
    double size = 0.0;      // Q, the execution's fill volume
    double response = 0.0;  // eps(t) * [m(t+tau) - m(t)]
};

// Logarithmic size bins; least squares of per-bin mean responses against
// per-bin mean ln Q. Throws "insufficient support" with < 2 nonempty bins.
ImpactFit fit_impact(std::span<const ImpactSample> samples, int n_bins = 20);

// Builds impact samples from a replay. m(t) is the mid before the execution's
// submit, m(t+tau) the mid tau snapshots after the cascade completed
// (tau >= 1). Executions without both mids are dropped.
std::vector<ImpactSample> impact_samples(const ReplayResult& rep,
                                         std::span<const OrderRecord> orders, int tau = 1);

ImpactFit price_impact(const ReplayResult& rep, std::span<const OrderRecord> orders, int tau = 1,
                       int n_bins = 20);

struct Calibration {
    double lambda = 0.0;  // Lambda, market orders per day
    double alpha = 0.0;   // exponential decay rate of market-order sizes, 1/USD
    ExpFit size_fit;
};

// Lambda = per-day traded volume / mean market-order size, averaged over days
// with at least one execution; alpha from the exponential fit of all
// execution sizes. Throws when there are no executions.
Calibration calibrate_intensity(std::span<const Execution> executions);

}  // namespace lobmm
