#include "lobmm/price_adjust.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lobmm/quoting.hpp"

namespace lobmm {
namespace {

struct Slope {
    double value = 0.0;
    double r_squared = 0.0;
    bool degenerate = false;
};

Slope ols_slope(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    Slope s;
    if (sxx == 0.0) {
        s.degenerate = true;
        return s;
    }
    s.value = sxy / sxx;
    s.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return s;
}

}  // namespace

ElasticityEstimate estimate_elasticity(std::span<const double> daily_mids,
                                       std::span<const double> daily_imbalances, int window) {
    if (window < 2) throw std::invalid_argument("estimate_elasticity: window >= 2");
    if (daily_mids.size() != daily_imbalances.size())
        throw std::invalid_argument("estimate_elasticity: misaligned series");
    if (daily_mids.size() < static_cast<std::size_t>(window) + 1)
        throw std::invalid_argument("estimate_elasticity: need >= window+1 days");

    const std::size_t n_trans = daily_mids.size() - 1;
    std::vector<double> dmid(n_trans);
    for (std::size_t t = 0; t < n_trans; ++t) dmid[t] = daily_mids[t + 1] - daily_mids[t];

    ElasticityEstimate est;
    est.window = window;
    est.n = daily_mids.size();
    est.xi.resize(n_trans, 0.0);
    est.degenerate.resize(n_trans, false);

    const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(window), n_trans);
    double current = 0.0;
    bool have_fit = false;
    std::size_t first_fit = w - 1;
    for (std::size_t t = first_fit; t < n_trans; ++t) {
        const std::size_t lo = t + 1 - w;
        Slope s = ols_slope(daily_imbalances.subspan(lo, w), std::span(dmid).subspan(lo, w));
        if (s.degenerate && have_fit) {
            est.degenerate[t] = true;  // carried forward
        } else if (s.degenerate) {
            est.degenerate[t] = true;
            current = 0.0;
        } else {
            current = s.value;
            est.r_squared = s.r_squared;
            have_fit = true;
        }
        est.xi[t] = current;
    }
    // backfill the warm-up days with the first available fit
    for (std::size_t t = 0; t < first_fit && t < n_trans; ++t) est.xi[t] = est.xi[first_fit];
    return est;
}

AdjustedSeries adjusted_chain(std::span<const double> baseline_mids,
                              std::span<const double> baseline_imbalances,
                              std::span<const double> mm_imbalances, std::span<const double> xi,
                              NoiseMode mode, std::span<const double> residuals, SplitRng* rng) {
    const std::size_t n = baseline_mids.size();
    if (n == 0) throw std::invalid_argument("adjusted_chain: empty series");
    if (baseline_imbalances.size() < n - 1 || mm_imbalances.size() < n - 1 || xi.size() < n - 1)
        throw std::invalid_argument("adjusted_chain: misaligned series");
    if (mode == NoiseMode::resample_residuals && (residuals.empty() || rng == nullptr))
        throw std::invalid_argument("adjusted_chain: residuals and rng required for noise");

    AdjustedSeries out;
    out.s_hat.resize(n);
    out.s_ref.resize(n);
    out.scale.resize(n);
    out.s_hat[0] = out.s_ref[0] = baseline_mids[0];
    out.scale[0] = 1.0;
    for (std::size_t t = 0; t + 1 < n; ++t) {
        double eps = 0.0;
        if (mode == NoiseMode::resample_residuals)
            eps = residuals[rng->next_below(residuals.size())];
        out.s_hat[t + 1] = out.s_hat[t] + xi[t] * mm_imbalances[t] + eps;
        out.s_ref[t + 1] = out.s_ref[t] + xi[t] * baseline_imbalances[t];
        out.scale[t + 1] = out.s_hat[t + 1] / out.s_ref[t + 1];
    }
    return out;
}

std::vector<OrderRecord> rescale_prices(std::span<const OrderRecord> orders, double s,
                                        double s_hat) {
    if (s == 0.0) throw std::invalid_argument("rescale_prices: zero reference mid");
    const double factor = s_hat / s;
    std::vector<OrderRecord> out(orders.begin(), orders.end());
    for (auto& o : out) o.price *= factor;
    return out;
}

A4Result run_a4_loop(std::span<const DayPartition> days, const A4Config& config) {
    A4Result result;
    result.mm = {config.sim.c0, config.sim.q0};
    if (days.empty()) return result;

    // Baseline pass: daily end-of-day mids and imbalances.
    Book base_book(config.sim.expiry_seconds);
    std::vector<double> base_mids, base_imb;
    double last_mid = 0.0;
    bool have_mid = false;
    auto run_baseline_day = [&](const DayPartition& day) {
        for (const auto& o : day.orders) base_book.submit(o);
        auto snap = base_book.snapshot();
        if (snap.mid) {
            last_mid = *snap.mid;
            have_mid = true;
        }
        base_mids.push_back(have_mid ? last_mid : 0.0);
        base_imb.push_back(snap.bid_total - snap.ask_total);
    };
    for (const auto& day : days) run_baseline_day(day);

    // Post-data horizon: bootstrap resamples of the final day, appended to
    // both passes with shifted timestamps.
    std::vector<DayPartition> extra_days;
    for (int k = 0; k < config.post_data_days; ++k) {
        SplitRng rng(config.seed, 0,
                     static_cast<std::uint64_t>(days.size()) + static_cast<std::uint64_t>(k));
        DayPartition resampled = resample_day(days.back(), rng);
        const std::int64_t shift = static_cast<std::int64_t>(k + 1) * kSecondsPerDay;
        resampled.day = days.back().day + k + 1;
        for (auto& o : resampled.orders) o.timestamp += shift;
        extra_days.push_back(std::move(resampled));
    }
    for (const auto& day : extra_days) run_baseline_day(day);

    // Elasticity from the in-data baseline; carried forward past the data end.
    const std::size_t n_data = days.size();
    const std::size_t n_total = n_data + extra_days.size();
    std::vector<double> xi(n_total > 0 ? n_total - 1 : 0, 0.0);
    {
        const int w = std::min<int>(config.elasticity_window,
                                    std::max<int>(2, static_cast<int>(n_data) - 1));
        if (n_data >= static_cast<std::size_t>(w) + 1) {
            auto est = estimate_elasticity(std::span(base_mids).first(n_data),
                                           std::span(base_imb).first(n_data), w);
            for (std::size_t t = 0; t < est.xi.size() && t < xi.size(); ++t) xi[t] = est.xi[t];
            for (std::size_t t = est.xi.size(); t < xi.size(); ++t) xi[t] = est.xi.back();
        }
    }

    // With-MM pass.
    Book book(config.sim.expiry_seconds);
    std::vector<double> mm_imb;
    std::vector<double> s_hat{base_mids.empty() ? 0.0 : base_mids[0]};
    std::vector<double> s_ref{s_hat[0]};
    std::vector<double> scale{1.0};
    std::vector<double> q_bid_rows, q_ask_rows;

    auto all_day = [&](std::size_t d) -> const DayPartition& {
        return d < n_data ? days[d] : extra_days[d - n_data];
    };

    for (std::size_t d = 0; d < n_total; ++d) {
        const DayPartition& day = all_day(d);
        const bool mm_active = d >= config.insertion_day;

        if (!mm_active) {
            for (const auto& o : day.orders) book.submit(o);
        } else {
            // One quote per day, per the daily cadence of the loop.
            const double s_day = s_hat[d];
            QuoteParams qp = config.sim.quote;
            bool quoting_ok = true;
            QuotePair quote;
            try {
                quote = quotes(s_day, result.mm.inventory / config.sim.quote_size, 0.0, qp);
            } catch (const std::exception&) {
                quoting_ok = false;
            }
            double bid_left = config.sim.quote_size;
            double ask_left = config.sim.quote_size;
            auto rescaled = rescale_prices(day.orders, s_ref[d], s_hat[d]);
            for (const auto& o : rescaled) {
                if (quoting_ok) {
                    auto fc = step_flow_cross(result.mm, quote, o, bid_left, ask_left);
                    if (fc.passthrough) book.submit(*fc.passthrough);
                } else {
                    book.submit(o);
                }
            }
        }

        auto snap = book.snapshot();
        mm_imb.push_back(snap.bid_total - snap.ask_total);
        q_bid_rows.push_back(snap.bid_total);
        q_ask_rows.push_back(snap.ask_total);

        if (d + 1 < n_total) {
            s_ref.push_back(s_ref[d] + xi[d] * base_imb[d]);
            s_hat.push_back(s_hat[d] + xi[d] * mm_imb[d]);
            scale.push_back(s_hat[d + 1] / s_ref[d + 1]);
        }
    }

    result.series.s_hat = s_hat;
    result.series.s_ref = s_ref;
    result.series.scale = scale;
    for (std::size_t d = 0; d < n_total; ++d) {
        A4DayRow row;
        row.day = all_day(d).day;
        row.s = s_ref[d];
        row.s_hat = s_hat[d];
        row.scale = scale[d];
        row.q_bid = q_bid_rows[d];
        row.q_ask = q_ask_rows[d];
        row.xi = d < xi.size() ? xi[d] : (xi.empty() ? 0.0 : xi.back());
        result.rows.push_back(row);
    }
    return result;
}

}  // namespace lobmm
