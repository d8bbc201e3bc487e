#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace lobmm {

// Unix seconds, UTC.
using Timestamp = std::int64_t;

constexpr std::int64_t kSecondsPerDay = 86400;

// Floor division so pre-1970 timestamps land on the correct calendar day.
inline std::int64_t day_of(Timestamp t) {
    std::int64_t d = t / kSecondsPerDay;
    if (t % kSecondsPerDay < 0) --d;
    return d;
}

// One declared buy/sell intention: sign +1 buy / -1 sell, price in CUP per
// USD, volume in USD.
struct OrderRecord {
    std::int64_t id = 0;
    int sign = 0;
    double price = 0.0;
    double volume = 0.0;
    Timestamp timestamp = 0;
};

// All orders of one UTC calendar day, sorted by (timestamp, id).
struct DayPartition {
    std::int64_t day = 0;
    std::vector<OrderRecord> orders;
};

// A matched trade. Price is always the resting order's price.
struct Execution {
    Timestamp time = 0;
    double price = 0.0;
    double volume = 0.0;
    int aggressor_sign = 0;
    std::int64_t maker_id = 0;
    std::int64_t taker_id = 0;
};

// Unfilled remainder of an order sitting in the book.
struct RestingOrder {
    std::int64_t order_id = 0;
    int sign = 0;
    double price = 0.0;
    double remaining_volume = 0.0;
    Timestamp entry_time = 0;
};

// (distance from the side's best price, resting volume at that distance)
struct DepthLevel {
    double distance = 0.0;
    double volume = 0.0;
};

struct BookSnapshot {
    Timestamp time = 0;
    std::optional<double> best_bid;
    std::optional<double> best_ask;
    std::optional<double> mid;
    std::optional<double> spread;
    std::vector<DepthLevel> bid_depth;
    std::vector<DepthLevel> ask_depth;
    double bid_total = 0.0;  // Q^b
    double ask_total = 0.0;  // Q^a
};

}  // namespace lobmm
