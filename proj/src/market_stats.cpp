#include "lobmm/market_stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace lobmm {

DailyStats daily_stats(const DayPartition& partition, std::span<const Execution> executions,
                       std::span<const BookSnapshot> snapshots) {
    DailyStats out;
    out.day = partition.day;

    for (const auto& o : partition.orders) out.submitted_volume += o.volume;
    for (const auto& e : executions) out.executed_volume += e.volume;
    if (out.submitted_volume > 0.0)
        out.execution_ratio = out.executed_volume / out.submitted_volume;

    if (!executions.empty()) {
        Ohlc c{executions.front().price, executions.front().price, executions.front().price,
               executions.back().price};
        for (const auto& e : executions) {
            c.high = std::max(c.high, e.price);
            c.low = std::min(c.low, e.price);
        }
        out.ohlc = c;
    }

    double spread_sum = 0.0;
    std::size_t spread_n = 0;
    double dist_bid_sum = 0.0, dist_ask_sum = 0.0;
    std::size_t dist_bid_n = 0, dist_ask_n = 0;
    for (const auto& s : snapshots) {
        if (s.spread && s.mid) {
            spread_sum += *s.spread / *s.mid;
            ++spread_n;
        }
        if (!s.mid) continue;
        // volume-weighted mean distance from the best, relative to the mid
        if (s.bid_total > 0.0) {
            double acc = 0.0;
            for (const auto& lvl : s.bid_depth) acc += lvl.distance * lvl.volume;
            dist_bid_sum += acc / s.bid_total / *s.mid;
            ++dist_bid_n;
        }
        if (s.ask_total > 0.0) {
            double acc = 0.0;
            for (const auto& lvl : s.ask_depth) acc += lvl.distance * lvl.volume;
            dist_ask_sum += acc / s.ask_total / *s.mid;
            ++dist_ask_n;
        }
    }
    if (spread_n) out.mean_relative_spread = spread_sum / static_cast<double>(spread_n);
    if (dist_bid_n) out.mean_relative_distance_bid = dist_bid_sum / static_cast<double>(dist_bid_n);
    if (dist_ask_n) out.mean_relative_distance_ask = dist_ask_sum / static_cast<double>(dist_ask_n);
    return out;
}

ExpFit fit_exponential(std::span<const double> samples) {
    if (samples.size() < 2) throw std::invalid_argument("fit_exponential: need n >= 2");
    double sum = 0.0;
    for (double x : samples) {
        if (!(x > 0.0)) throw std::invalid_argument("fit_exponential: nonpositive sample");
        sum += x;
    }
    ExpFit fit;
    fit.n = samples.size();
    fit.rate = static_cast<double>(samples.size()) / sum;

    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double cdf = 1.0 - std::exp(-fit.rate * sorted[i]);
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - cdf));
        d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
    }
    fit.ks_stat = d;
    return fit;
}

VolumeProfile volume_profile(std::span<const BookSnapshot> snapshots, Side side,
                             std::span<const double> edges) {
    if (edges.size() < 2) throw std::invalid_argument("volume_profile: need >= 2 bucket edges");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i] > edges[i - 1]))
            throw std::invalid_argument("volume_profile: edges must be strictly increasing");

    const std::size_t n_buckets = edges.size() - 1;
    std::vector<double> acc(n_buckets, 0.0);
    std::size_t used = 0;
    for (const auto& s : snapshots) {
        const auto& depth = side == Side::bid ? s.bid_depth : s.ask_depth;
        const double total = side == Side::bid ? s.bid_total : s.ask_total;
        if (depth.empty() || !(total > 0.0) || !s.mid) continue;
        std::vector<double> frac(n_buckets, 0.0);
        for (const auto& lvl : depth) {
            const double rel = lvl.distance / *s.mid;
            auto it = std::upper_bound(edges.begin(), edges.end(), rel);
            if (it == edges.begin() || it == edges.end()) continue;  // outside range
            frac[static_cast<std::size_t>(it - edges.begin()) - 1] += lvl.volume / total;
        }
        for (std::size_t b = 0; b < n_buckets; ++b) acc[b] += frac[b];
        ++used;
    }
    if (used == 0) throw std::invalid_argument("volume_profile: no usable snapshot");

    VolumeProfile prof;
    prof.side = side;
    prof.edges.assign(edges.begin(), edges.end());
    prof.mean_relative_volume.resize(n_buckets);
    for (std::size_t b = 0; b < n_buckets; ++b)
        prof.mean_relative_volume[b] = acc[b] / static_cast<double>(used);
    return prof;
}

std::vector<std::pair<double, double>> ecdf_tail(std::span<const double> sizes) {
    std::vector<double> sorted(sizes.begin(), sizes.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    std::vector<std::pair<double, double>> out;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        out.emplace_back(sorted[i], static_cast<double>(sorted.size() - j) / n);
        i = j;
    }
    return out;
}

namespace {

struct LineFit {
    double slope = 0.0, intercept = 0.0, r_squared = 1.0;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
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
    LineFit fit;
    fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = (sxx > 0.0 && syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

}  // namespace

ImpactFit fit_impact(std::span<const ImpactSample> samples, int n_bins) {
    if (samples.empty()) throw std::invalid_argument("fit_impact: insufficient support");
    double lo = samples[0].size, hi = samples[0].size;
    for (const auto& s : samples) {
        if (!(s.size > 0.0)) throw std::invalid_argument("fit_impact: nonpositive size");
        lo = std::min(lo, s.size);
        hi = std::max(hi, s.size);
    }

    const double llo = std::log(lo), lhi = std::log(hi);
    const double width = (lhi - llo) / n_bins;
    std::vector<double> sum_log(n_bins, 0.0), sum_resp(n_bins, 0.0);
    std::vector<std::size_t> count(n_bins, 0);
    for (const auto& s : samples) {
        int b = width > 0.0 ? static_cast<int>((std::log(s.size) - llo) / width) : 0;
        b = std::clamp(b, 0, n_bins - 1);
        sum_log[b] += std::log(s.size);
        sum_resp[b] += s.response;
        ++count[b];
    }

    ImpactFit fit;
    for (int b = 0; b < n_bins; ++b) {
        if (count[b] == 0) continue;
        fit.bin_log_size.push_back(sum_log[b] / static_cast<double>(count[b]));
        fit.bin_mean_response.push_back(sum_resp[b] / static_cast<double>(count[b]));
        fit.bin_count.push_back(count[b]);
    }
    if (fit.bin_log_size.size() < 2) throw std::invalid_argument("fit_impact: insufficient support");

    const LineFit line = least_squares(fit.bin_log_size, fit.bin_mean_response);
    fit.K = line.slope;
    fit.intercept = line.intercept;
    fit.r_squared = line.r_squared;
    return fit;
}

std::vector<ImpactSample> impact_samples(const ReplayResult& rep,
                                         std::span<const OrderRecord> orders, int tau) {
    if (tau < 1) throw std::invalid_argument("impact_samples: tau must be >= 1");
    std::unordered_map<std::int64_t, std::size_t> submit_index;
    submit_index.reserve(orders.size());
    for (std::size_t i = 0; i < orders.size(); ++i) submit_index[orders[i].id] = i;

    std::vector<ImpactSample> out;
    for (const auto& e : rep.executions) {
        auto it = submit_index.find(e.taker_id);
        if (it == submit_index.end()) continue;
        const std::size_t i = it->second;
        // mid before the aggressor arrived, and tau events after the cascade
        if (i == 0) continue;
        const std::size_t after = i - 1 + static_cast<std::size_t>(tau);
        if (after >= rep.snapshots.size()) continue;
        const auto& before_snap = rep.snapshots[i - 1];
        const auto& after_snap = rep.snapshots[after];
        if (!before_snap.mid || !after_snap.mid) continue;
        out.push_back({e.volume, e.aggressor_sign * (*after_snap.mid - *before_snap.mid)});
    }
    return out;
}

ImpactFit price_impact(const ReplayResult& rep, std::span<const OrderRecord> orders, int tau,
                       int n_bins) {
    auto samples = impact_samples(rep, orders, tau);
    ImpactFit fit = fit_impact(samples, n_bins);
    fit.tau = tau;
    return fit;
}

Calibration calibrate_intensity(std::span<const Execution> executions) {
    if (executions.empty()) throw std::invalid_argument("calibrate_intensity: no executions");

    std::map<std::int64_t, std::pair<double, std::size_t>> per_day;  // day -> (volume, count)
    std::vector<double> sizes;
    sizes.reserve(executions.size());
    for (const auto& e : executions) {
        auto& [vol, cnt] = per_day[day_of(e.time)];
        vol += e.volume;
        ++cnt;
        sizes.push_back(e.volume);
    }

    Calibration cal;
    double lambda_sum = 0.0;
    for (const auto& [day, entry] : per_day) {
        const auto& [vol, cnt] = entry;
        const double mean_size = vol / static_cast<double>(cnt);
        lambda_sum += vol / mean_size;  // = count, the daily market-order frequency
    }
    cal.lambda = lambda_sum / static_cast<double>(per_day.size());
    if (sizes.size() >= 2) {
        cal.size_fit = fit_exponential(sizes);
        cal.alpha = cal.size_fit.rate;
    } else {
        cal.size_fit = {1.0 / sizes.front(), 1, 0.0};
        cal.alpha = cal.size_fit.rate;
    }
    return cal;
}

}  // namespace lobmm
