#include "lobmm/lob_engine.hpp"

#include <algorithm>

namespace lobmm {

Book::Book(std::int64_t expiry_seconds) : expiry_seconds_(expiry_seconds) {}

std::optional<double> Book::best_bid() const {
    if (bids_.empty()) return std::nullopt;
    return bids_.begin()->first;
}

std::optional<double> Book::best_ask() const {
    if (asks_.empty()) return std::nullopt;
    return asks_.begin()->first;
}

std::optional<double> Book::mid() const {
    auto b = best_bid();
    auto a = best_ask();
    if (!b || !a) return std::nullopt;
    return 0.5 * (*a + *b);
}

void Book::erase_resting(std::int64_t order_id) {
    auto it = index_.find(order_id);
    if (it == index_.end()) return;
    const Handle& h = it->second;
    if (h.sign > 0) {
        auto lvl = bids_.find(h.price);
        lvl->second.erase(h.it);
        if (lvl->second.empty()) bids_.erase(lvl);
    } else {
        auto lvl = asks_.find(h.price);
        lvl->second.erase(h.it);
        if (lvl->second.empty()) asks_.erase(lvl);
    }
    index_.erase(it);
}

std::vector<RestingOrder> Book::expire(Timestamp now) {
    if (now > clock_) clock_ = now;
    const Timestamp cutoff = now - expiry_seconds_;
    std::vector<RestingOrder> removed;
    while (!expiry_fifo_.empty()) {
        const std::int64_t id = expiry_fifo_.front();
        auto it = index_.find(id);
        if (it == index_.end()) {  // already filled or cancelled
            expiry_fifo_.pop_front();
            continue;
        }
        const RestingOrder& ro = *it->second.it;
        if (ro.entry_time > cutoff) break;
        removed.push_back(ro);
        ledger_.expired += ro.remaining_volume;
        ledger_.resting -= ro.remaining_volume;
        erase_resting(id);
        expiry_fifo_.pop_front();
    }
    return removed;
}

bool Book::cancel(std::int64_t order_id) {
    auto it = index_.find(order_id);
    if (it == index_.end()) return false;
    const RestingOrder& ro = *it->second.it;
    ledger_.cancelled += ro.remaining_volume;
    ledger_.resting -= ro.remaining_volume;
    erase_resting(order_id);
    return true;
}

Book::SubmitResult Book::submit(const OrderRecord& order) {
    SubmitResult result;
    result.expired = expire(std::max(order.timestamp, clock_));

    if (!(order.price > 0.0) || !(order.volume > 0.0) || (order.sign != 1 && order.sign != -1)) {
        ledger_.submitted += std::max(order.volume, 0.0);
        ledger_.rejected += std::max(order.volume, 0.0);
        result.rejected = true;
        return result;
    }

    ledger_.submitted += order.volume;
    double remaining = order.volume;

    auto fill_from = [&](auto& levels, auto crosses) {
        while (remaining > 0.0 && !levels.empty()) {
            auto lvl = levels.begin();
            if (!crosses(lvl->first)) break;
            Level& queue = lvl->second;
            while (remaining > 0.0 && !queue.empty()) {
                RestingOrder& maker = queue.front();
                const double v = std::min(remaining, maker.remaining_volume);
                result.executions.push_back(
                    {order.timestamp, maker.price, v, order.sign, maker.order_id, order.id});
                maker.remaining_volume -= v;
                remaining -= v;
                ledger_.executed_maker += v;
                ledger_.executed_taker += v;
                ledger_.resting -= v;
                if (maker.remaining_volume <= 0.0) {
                    index_.erase(maker.order_id);
                    queue.pop_front();
                }
            }
            if (queue.empty()) levels.erase(lvl);
        }
    };

    if (order.sign > 0) {
        fill_from(asks_, [&](double p) { return p <= order.price; });
    } else {
        fill_from(bids_, [&](double p) { return p >= order.price; });
    }

    if (remaining > 0.0) {
        RestingOrder ro{order.id, order.sign, order.price, remaining, order.timestamp};
        if (order.sign > 0) {
            auto& queue = bids_[order.price];
            queue.push_back(ro);
            index_[order.id] = {+1, order.price, std::prev(queue.end())};
        } else {
            auto& queue = asks_[order.price];
            queue.push_back(ro);
            index_[order.id] = {-1, order.price, std::prev(queue.end())};
        }
        expiry_fifo_.push_back(order.id);
        ledger_.resting += remaining;
        result.rested = ro;
    }
    return result;
}

BookSnapshot Book::snapshot() const {
    BookSnapshot snap;
    snap.time = clock_;
    snap.best_bid = best_bid();
    snap.best_ask = best_ask();
    if (snap.best_bid && snap.best_ask) {
        snap.mid = 0.5 * (*snap.best_bid + *snap.best_ask);
        snap.spread = *snap.best_ask - *snap.best_bid;
    }
    for (const auto& [price, queue] : bids_) {
        double vol = 0.0;
        for (const auto& ro : queue) vol += ro.remaining_volume;
        snap.bid_depth.push_back({*snap.best_bid - price, vol});
        snap.bid_total += vol;
    }
    for (const auto& [price, queue] : asks_) {
        double vol = 0.0;
        for (const auto& ro : queue) vol += ro.remaining_volume;
        snap.ask_depth.push_back({price - *snap.best_ask, vol});
        snap.ask_total += vol;
    }
    return snap;
}

std::vector<RestingOrder> Book::resting_orders() const {
    std::vector<RestingOrder> out;
    for (const auto& [price, queue] : bids_)
        for (const auto& ro : queue) out.push_back(ro);
    for (const auto& [price, queue] : asks_)
        for (const auto& ro : queue) out.push_back(ro);
    return out;
}

std::optional<double> distance_to_best(const RestingOrder& order, const BookSnapshot& snap) {
    if (order.sign > 0) {
        if (!snap.best_bid) return std::nullopt;
        return *snap.best_bid - order.price;
    }
    if (!snap.best_ask) return std::nullopt;
    return order.price - *snap.best_ask;
}

ReplayResult replay(std::span<const OrderRecord> orders, std::int64_t expiry_seconds) {
    Book book(expiry_seconds);
    ReplayResult result;
    result.snapshots.reserve(orders.size());
    for (const auto& o : orders) {
        auto sub = book.submit(o);
        if (sub.rejected) ++result.rejected_count;
        result.executions.insert(result.executions.end(), sub.executions.begin(),
                                 sub.executions.end());
        result.snapshots.push_back(book.snapshot());
    }
    result.ledger = book.ledger();
    return result;
}

}  // namespace lobmm
