#pragma once

#include <deque>
#include <limits>
#include <list>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "lobmm/types.hpp"

namespace lobmm {

// Volume accounting across the life of a book. The conservation identity is
//   submitted = executed_maker + executed_taker + resting + expired
//             + rejected + cancelled
// where each execution of volume v consumes v from the maker's resting
// volume and v from the taker's incoming volume.
struct VolumeLedger {
    double submitted = 0.0;
    double executed_maker = 0.0;
    double executed_taker = 0.0;
    double resting = 0.0;
    double expired = 0.0;
    double rejected = 0.0;
    double cancelled = 0.0;

    // executed volume counted once per trade
    double executed() const { return executed_taker; }
};

// Two-sided limit order book with price-time priority, maker-price fills and
// lazy 7-day expiry. Single writer per instance; snapshots are plain values.
class Book {
public:
    explicit Book(std::int64_t expiry_seconds = 7 * kSecondsPerDay);

    struct SubmitResult {
        std::vector<Execution> executions;
        std::optional<RestingOrder> rested;
        std::vector<RestingOrder> expired;
        bool rejected = false;
    };

    // Expires stale orders up to order.timestamp, then matches against the
    // opposite side from the best price outward, FIFO within a level. Each
    // fill executes at the resting order's price; any remainder rests.
    // Nonpositive price/volume is rejected and leaves the book unchanged.
    SubmitResult submit(const OrderRecord& order);

    // Removes every resting order with entry_time <= now - expiry_window and
    // advances the clock. Returns the removed orders.
    std::vector<RestingOrder> expire(Timestamp now);

    // Removes a specific resting order (used for quote refreshes).
    bool cancel(std::int64_t order_id);

    BookSnapshot snapshot() const;

    const VolumeLedger& ledger() const { return ledger_; }
    Timestamp clock() const { return clock_; }
    std::int64_t expiry_seconds() const { return expiry_seconds_; }
    bool empty() const { return bids_.empty() && asks_.empty(); }

    std::optional<double> best_bid() const;
    std::optional<double> best_ask() const;
    std::optional<double> mid() const;

    // All resting orders, bids then asks, in book order.
    std::vector<RestingOrder> resting_orders() const;

private:
    using Level = std::list<RestingOrder>;

    void erase_resting(std::int64_t order_id);

    std::map<double, Level, std::greater<double>> bids_;
    std::map<double, Level> asks_;
    struct Handle {
        int sign;
        double price;
        Level::iterator it;
    };
    std::unordered_map<std::int64_t, Handle> index_;
    // Resting orders enter in nondecreasing entry_time, so a FIFO suffices
    // for expiry. Dead ids are skipped via index_ lookup.
    std::deque<std::int64_t> expiry_fifo_;
    Timestamp clock_ = std::numeric_limits<Timestamp>::min();
    std::int64_t expiry_seconds_;
    VolumeLedger ledger_;
};

// Signed distance-from-best convention folded to the nonnegative side:
// buys d = b(t) - p, sells d = p - a(t). Empty same side -> nullopt.
std::optional<double> distance_to_best(const RestingOrder& order, const BookSnapshot& snap);

// Replays an order sequence through a fresh book, snapshotting after every
// submit (event-driven cadence).
struct ReplayResult {
    std::vector<Execution> executions;
    std::vector<BookSnapshot> snapshots;  // snapshots[i] = state after orders[i]
    VolumeLedger ledger;
    std::size_t rejected_count = 0;
};

ReplayResult replay(std::span<const OrderRecord> orders,
                    std::int64_t expiry_seconds = 7 * kSecondsPerDay);

}  // namespace lobmm
