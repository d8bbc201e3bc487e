#include "lobmm/mm_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lobmm {

double estimate_sigma(std::span<const double> daily_mids) {
    if (daily_mids.size() < 2) throw std::invalid_argument("estimate_sigma: need >= 2 mids");
    std::vector<double> diffs;
    diffs.reserve(daily_mids.size() - 1);
    for (std::size_t i = 1; i < daily_mids.size(); ++i)
        diffs.push_back(daily_mids[i] - daily_mids[i - 1]);
    double mean = 0.0;
    for (double d : diffs) mean += d;
    mean /= static_cast<double>(diffs.size());
    double var = 0.0;
    for (double d : diffs) var += (d - mean) * (d - mean);
    return std::sqrt(var / static_cast<double>(diffs.size()));
}

SigmaSchedule sigma_schedule(std::span<const double> daily_mids, SigmaMode mode,
                             int window_days) {
    if (window_days < 1) throw std::invalid_argument("sigma_schedule: window_days >= 1");
    SigmaSchedule sched;
    const std::size_t n = daily_mids.size();
    sched.per_day.resize(n, 0.0);
    if (mode == SigmaMode::fixed) {
        const double sigma = estimate_sigma(daily_mids);
        std::fill(sched.per_day.begin(), sched.per_day.end(), sigma);
        sched.refreshes = 1;
        return sched;
    }
    const std::size_t w = static_cast<std::size_t>(window_days);
    double current = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
        if (d % w == 0) {
            // trailing window; the first refresh has no history and uses the
            // leading window instead
            const std::size_t lo = d >= w ? d - w : 0;
            const std::size_t hi = d >= w ? d : std::min(w, n - 1);
            const std::size_t count = hi - lo + 1;
            if (count >= 2)
                current = estimate_sigma(daily_mids.subspan(lo, count));
            else
                current = estimate_sigma(daily_mids);
            ++sched.refreshes;
        }
        sched.per_day[d] = current;
    }
    return sched;
}

std::pair<int, int> step_poisson(MMState& state, const QuotePair& quotes, double lambda_b,
                                 double lambda_a, double dt, double quote_size, SplitRng& rng) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_poisson: dt must be positive");
    const int cap = static_cast<int>(quote_size);
    int n_b = lambda_b > 0.0 ? std::min(rng.next_poisson(lambda_b * dt), cap) : 0;
    int n_a = lambda_a > 0.0 ? std::min(rng.next_poisson(lambda_a * dt), cap) : 0;
    state.cash += quotes.ask * n_a - quotes.bid * n_b;
    state.inventory += n_b - n_a;
    return {n_b, n_a};
}

FlowCrossResult step_flow_cross(MMState& state, const QuotePair& quotes,
                                const OrderRecord& incoming, double& bid_size_left,
                                double& ask_size_left) {
    FlowCrossResult result;
    double filled = 0.0;
    if (incoming.sign == -1 && incoming.price < quotes.bid && bid_size_left > 0.0) {
        filled = std::min(incoming.volume, bid_size_left);
        bid_size_left -= filled;
        state.cash -= quotes.bid * filled;
        state.inventory += filled;
        result.fill = MMFill{incoming.timestamp, quotes.bid, filled, +1};
    } else if (incoming.sign == +1 && incoming.price > quotes.ask && ask_size_left > 0.0) {
        filled = std::min(incoming.volume, ask_size_left);
        ask_size_left -= filled;
        state.cash += quotes.ask * filled;
        state.inventory -= filled;
        result.fill = MMFill{incoming.timestamp, quotes.ask, filled, -1};
    }
    if (incoming.volume - filled > 0.0) {
        OrderRecord rest = incoming;
        rest.volume = incoming.volume - filled;
        result.passthrough = rest;
    }
    return result;
}

namespace {

struct DayAccumulator {
    double submitted = 0.0;
    double executed = 0.0;
    double rel_spread_sum = 0.0;
    std::size_t rel_spread_n = 0;

    void add_snapshot(const BookSnapshot& snap) {
        if (snap.spread && snap.mid) {
            rel_spread_sum += *snap.spread / *snap.mid;
            ++rel_spread_n;
        }
    }

    DailyQuality finish(std::int64_t day) const {
        DailyQuality q;
        q.day = day;
        if (submitted > 0.0) q.execution_ratio = executed / submitted;
        if (rel_spread_n)
            q.mean_relative_spread = rel_spread_sum / static_cast<double>(rel_spread_n);
        return q;
    }
};

constexpr std::int64_t kMMIdBase = std::int64_t{1} << 40;

}  // namespace

SimResult run_simulation(std::span<const DayPartition> days, const SimConfig& config,
                         std::uint64_t seed) {
    SimResult result;
    MMState mm{config.c0, config.q0};

    if (days.empty()) {
        result.final_cash = mm.cash;
        result.final_inventory = mm.inventory;
        result.final_wealth = mm.cash;
        return result;
    }

    // Baseline: plain replay of the concatenated flow.
    std::vector<OrderRecord> all_orders;
    for (const auto& day : days)
        all_orders.insert(all_orders.end(), day.orders.begin(), day.orders.end());
    const ReplayResult baseline = replay(all_orders, config.expiry_seconds);

    {
        std::vector<DayAccumulator> accs(days.size());
        std::size_t pos = 0;
        double last_mid = 0.0;
        bool have_mid = false;
        for (std::size_t d = 0; d < days.size(); ++d) {
            for (const auto& o : days[d].orders) accs[d].submitted += o.volume;
            for (std::size_t i = 0; i < days[d].orders.size(); ++i, ++pos)
                accs[d].add_snapshot(baseline.snapshots[pos]);
            if (pos > 0 && baseline.snapshots[pos - 1].mid) {
                last_mid = *baseline.snapshots[pos - 1].mid;
                have_mid = true;
            }
            result.baseline_daily_mids.push_back(have_mid ? last_mid : 0.0);
        }
        std::size_t di = 0;
        for (const auto& e : baseline.executions) {
            while (di + 1 < days.size() && day_of(e.time) > days[di].day) ++di;
            if (day_of(e.time) == days[di].day) accs[di].executed += e.volume;
        }
        for (std::size_t d = 0; d < days.size(); ++d)
            result.baseline_quality.push_back(accs[d].finish(days[d].day));
    }

    // Sigma per day, from the baseline mid series where possible.
    std::vector<double> sigma_per_day(days.size(), config.quote.sigma);
    if (result.baseline_daily_mids.size() >= 2) {
        bool all_known = true;
        for (double m : result.baseline_daily_mids)
            if (m == 0.0) all_known = false;
        if (all_known) {
            auto sched =
                sigma_schedule(result.baseline_daily_mids, config.sigma_mode, config.window_days);
            sigma_per_day = sched.per_day;
        }
    }

    // With-MM run: same flow, MM quotes injected as resting orders.
    Book book(config.expiry_seconds);
    MMState injected{config.c0, config.q0};
    std::int64_t next_mm_id = kMMIdBase;
    std::int64_t live_bid_id = -1, live_ask_id = -1;
    double last_mid = 0.0;
    bool have_mid = false;
    std::vector<DayAccumulator> mm_accs(days.size());

    auto apply_mm_executions = [&](const std::vector<Execution>& execs, double& executed_acc) {
        for (const auto& e : execs) {
            executed_acc += e.volume;
            const bool maker_mm = e.maker_id >= kMMIdBase;
            const bool taker_mm = e.taker_id >= kMMIdBase;
            if (!maker_mm && !taker_mm) continue;
            // the MM leg's direction: as maker its own resting side, as taker
            // the aggressor sign
            int mm_sign = taker_mm ? e.aggressor_sign : -e.aggressor_sign;
            injected.cash -= mm_sign * e.price * e.volume;
            injected.inventory += mm_sign * e.volume;
            result.fills.push_back({e.time, e.price, e.volume, mm_sign});
        }
    };

    for (std::size_t d = 0; d < days.size(); ++d) {
        const std::int64_t day_start = days[d].day * kSecondsPerDay;
        for (const auto& o : days[d].orders) {
            mm_accs[d].submitted += o.volume;

            // refresh quotes
            if (live_bid_id >= 0) book.cancel(live_bid_id);
            if (live_ask_id >= 0) book.cancel(live_ask_id);
            live_bid_id = live_ask_id = -1;

            const double s = book.mid() ? *book.mid() : (have_mid ? last_mid : o.price);
            const double t_frac = std::clamp(
                static_cast<double>(o.timestamp - day_start) / kSecondsPerDay, 0.0, 1.0);
            QuoteParams qp = config.quote;
            qp.sigma = sigma_per_day[d];
            bool quoting_ok = true;
            QuotePair quote;
            try {
                quote = quotes(s, injected.inventory / config.quote_size, t_frac, qp);
            } catch (const std::exception&) {
                quoting_ok = false;
                ++result.solver_failures;
            }
            if (quoting_ok && quote.bid > 0.0 && quote.bid < quote.ask) {
                OrderRecord mm_bid{next_mm_id++, +1, quote.bid, config.quote_size, o.timestamp};
                OrderRecord mm_ask{next_mm_id++, -1, quote.ask, config.quote_size, o.timestamp};
                auto rb = book.submit(mm_bid);
                apply_mm_executions(rb.executions, mm_accs[d].executed);
                if (rb.rested) live_bid_id = mm_bid.id;
                auto ra = book.submit(mm_ask);
                apply_mm_executions(ra.executions, mm_accs[d].executed);
                if (ra.rested) live_ask_id = mm_ask.id;
                result.series.push_back({o.timestamp, injected.cash, injected.inventory,
                                         quote.bid, quote.ask, book.mid()});
            }

            auto rp = book.submit(o);
            apply_mm_executions(rp.executions, mm_accs[d].executed);
            mm_accs[d].add_snapshot(book.snapshot());
            if (book.mid()) {
                last_mid = *book.mid();
                have_mid = true;
            }
        }
    }
    for (std::size_t d = 0; d < days.size(); ++d)
        result.with_mm_quality.push_back(mm_accs[d].finish(days[d].day));

    if (config.fill_mode == FillMode::flow_cross) {
        mm = injected;
    } else {
        // Poisson fills against the baseline mid path.
        result.fills.clear();
        result.series.clear();
        for (std::size_t d = 0; d < days.size(); ++d) {
            SplitRng rng(seed, 1, static_cast<std::uint64_t>(d));
            const double s = result.baseline_daily_mids[d];
            QuoteParams qp = config.quote;
            qp.sigma = sigma_per_day[d];
            const std::int64_t day_start = days[d].day * kSecondsPerDay;
            for (double t = 0.0; t < 1.0; t += config.dt) {
                QuotePair quote;
                try {
                    quote = quotes(s, mm.inventory, t, qp);
                } catch (const std::exception&) {
                    ++result.solver_failures;
                    continue;
                }
                const double lb = intensity(quote.delta_b, qp.intensity);
                const double la = intensity(quote.delta_a, qp.intensity);
                auto [nb, na] = step_poisson(mm, quote, lb, la, config.dt, config.quote_size, rng);
                const Timestamp ts = day_start + static_cast<Timestamp>(t * kSecondsPerDay);
                if (nb) result.fills.push_back({ts, quote.bid, static_cast<double>(nb), +1});
                if (na) result.fills.push_back({ts, quote.ask, static_cast<double>(na), -1});
                result.series.push_back({ts, mm.cash, mm.inventory, quote.bid, quote.ask, s});
            }
        }
    }

    result.final_cash = mm.cash;
    result.final_inventory = mm.inventory;
    const double s_T =
        !result.baseline_daily_mids.empty() && result.baseline_daily_mids.back() != 0.0
            ? result.baseline_daily_mids.back()
            : 0.0;
    result.final_wealth = mm.cash + mm.inventory * s_T;
    return result;
}

}  // namespace lobmm
