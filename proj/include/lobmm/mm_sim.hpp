#pragma once

#include <span>
#include <vector>

#include "lobmm/bootstrap.hpp"
#include "lobmm/lob_engine.hpp"
#include "lobmm/quoting.hpp"
#include "lobmm/types.hpp"

namespace lobmm {

enum class SigmaMode { fixed, rolling };
enum class FillMode { poisson, flow_cross };

struct SimConfig {
    double c0 = 1e5;  // CUP
    double q0 = 0.0;  // USD
    QuoteParams quote;
    SigmaMode sigma_mode = SigmaMode::fixed;
    int window_days = 10;
    FillMode fill_mode = FillMode::flow_cross;
    double dt = 0.01;          // days per step, poisson mode
    double quote_size = 100.0;  // USD per side per refresh; also the lot size
    std::int64_t expiry_seconds = 7 * kSecondsPerDay;
};

struct MMState {
    double cash = 0.0;       // CUP
    double inventory = 0.0;  // USD, signed
};

struct MMFill {
    Timestamp time = 0;
    double price = 0.0;
    double volume = 0.0;  // USD
    int mm_sign = 0;      // +1 the MM bought, -1 the MM sold
};

// Population standard deviation of successive mid changes; throws with < 2 mids.
double estimate_sigma(std::span<const double> daily_mids);

struct SigmaSchedule {
    std::vector<double> per_day;
    int refreshes = 0;
};

// fixed: one estimate over the full horizon. rolling: re-estimated every
// window_days days over the trailing window (the first refresh, lacking
// history, uses the leading window).
SigmaSchedule sigma_schedule(std::span<const double> daily_mids, SigmaMode mode, int window_days);

// One Poisson step: fill counts ~ Poisson(lambda*dt), capped at quote_size
// lots, applied at the quoted prices. Returns (bid fills, ask fills).
std::pair<int, int> step_poisson(MMState& state, const QuotePair& quotes, double lambda_b,
                                 double lambda_a, double dt, double quote_size, SplitRng& rng);

struct FlowCrossResult {
    std::optional<MMFill> fill;
    std::optional<OrderRecord> passthrough;  // residual volume for the public book
};

// A4 crossing rule: an incoming sell strictly below the MM bid trades at the
// bid; an incoming buy strictly above the MM ask trades at the ask. At most
// one fill per order, capped by the remaining per-refresh quote size.
FlowCrossResult step_flow_cross(MMState& state, const QuotePair& quotes,
                                const OrderRecord& incoming, double& bid_size_left,
                                double& ask_size_left);

struct DailyQuality {
    std::int64_t day = 0;
    std::optional<double> execution_ratio;
    std::optional<double> mean_relative_spread;
};

struct SimPoint {
    Timestamp time = 0;
    double cash = 0.0;
    double inventory = 0.0;
    double bid = 0.0;
    double ask = 0.0;
    std::optional<double> mid;
};

struct SimResult {
    double final_cash = 0.0;
    double final_inventory = 0.0;  // USD
    double final_wealth = 0.0;     // c_T + q_T * s_T
    std::vector<SimPoint> series;
    std::vector<MMFill> fills;
    std::vector<DailyQuality> baseline_quality;
    std::vector<DailyQuality> with_mm_quality;
    std::vector<double> baseline_daily_mids;
    int solver_failures = 0;
};

// Runs the baseline replay and the with-MM run over identical flow. The
// with-MM run injects the MM's bid/ask as resting orders of quote_size,
// refreshed before every incoming order, so public flow can cross them;
// market quality is measured on both runs. The MM's P&L comes from those
// injected fills in flow_cross mode, or from a Poisson fill process driven by
// the calibrated intensity in poisson mode.
SimResult run_simulation(std::span<const DayPartition> days, const SimConfig& config,
                         std::uint64_t seed);

}  // namespace lobmm
