#include "lobmm/exports.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "lobmm/ingest.hpp"

namespace lobmm {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? fmt_double(*v) : ""; }

}  // namespace

void write_execution_log(std::span<const Execution> executions, std::ostream& out) {
    out << "time,price,volume,aggressor,maker_id,taker_id\n";
    for (const auto& e : executions)
        out << format_timestamp(e.time) << ',' << fmt_double(e.price) << ','
            << fmt_double(e.volume) << ',' << e.aggressor_sign << ',' << e.maker_id << ','
            << e.taker_id << '\n';
}

void write_snapshot_table(std::span<const BookSnapshot> snapshots, std::ostream& out) {
    out << "time,best_bid,best_ask,mid,spread,bid_total,ask_total\n";
    for (const auto& s : snapshots)
        out << format_timestamp(s.time) << ',' << opt(s.best_bid) << ',' << opt(s.best_ask) << ','
            << opt(s.mid) << ',' << opt(s.spread) << ',' << fmt_double(s.bid_total) << ','
            << fmt_double(s.ask_total) << '\n';
}

void write_depth_json(const BookSnapshot& snapshot, std::ostream& out) {
    nlohmann::json j;
    j["time"] = format_timestamp(snapshot.time);
    auto side = [](const std::vector<DepthLevel>& depth) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& lvl : depth) arr.push_back({{"distance", lvl.distance}, {"volume", lvl.volume}});
        return arr;
    };
    j["bids"] = side(snapshot.bid_depth);
    j["asks"] = side(snapshot.ask_depth);
    out << j.dump(2) << '\n';
}

void write_daily_stats(std::span<const DailyStats> stats, std::ostream& out) {
    out << "day,open,high,low,close,executed_volume,submitted_volume,execution_ratio,"
           "mean_relative_spread,mean_relative_distance_bid,mean_relative_distance_ask\n";
    for (const auto& s : stats) {
        out << format_timestamp(s.day * kSecondsPerDay).substr(0, 10) << ',';
        if (s.ohlc)
            out << fmt_double(s.ohlc->open) << ',' << fmt_double(s.ohlc->high) << ','
                << fmt_double(s.ohlc->low) << ',' << fmt_double(s.ohlc->close);
        else
            out << ",,,";
        out << ',' << fmt_double(s.executed_volume) << ',' << fmt_double(s.submitted_volume) << ','
            << opt(s.execution_ratio) << ',' << opt(s.mean_relative_spread) << ','
            << opt(s.mean_relative_distance_bid) << ',' << opt(s.mean_relative_distance_ask)
            << '\n';
    }
}

void write_histogram(std::span<const double> samples, std::size_t n_bins, std::ostream& out) {
    out << "bin_lo,bin_hi,count\n";
    if (samples.empty() || n_bins == 0) return;
    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *lo_it, hi = *hi_it;
    const double width = hi > lo ? (hi - lo) / static_cast<double>(n_bins) : 1.0;
    std::vector<std::size_t> counts(n_bins, 0);
    for (double x : samples) {
        auto b = static_cast<std::size_t>((x - lo) / width);
        counts[std::min(b, n_bins - 1)]++;
    }
    for (std::size_t b = 0; b < n_bins; ++b)
        out << fmt_double(lo + width * static_cast<double>(b)) << ','
            << fmt_double(lo + width * static_cast<double>(b + 1)) << ',' << counts[b] << '\n';
}

void write_profile(const VolumeProfile& profile, std::ostream& out) {
    out << "side,bucket_lo,bucket_hi,mean_relative_volume\n";
    const char* side = profile.side == Side::bid ? "bid" : "ask";
    for (std::size_t b = 0; b + 1 < profile.edges.size(); ++b)
        out << side << ',' << fmt_double(profile.edges[b]) << ',' << fmt_double(profile.edges[b + 1])
            << ',' << fmt_double(profile.mean_relative_volume[b]) << '\n';
}

void write_ecdf(std::span<const std::pair<double, double>> tail, std::ostream& out) {
    out << "x,tail_probability\n";
    for (const auto& [x, p] : tail) out << fmt_double(x) << ',' << fmt_double(p) << '\n';
}

void write_impact(const ImpactFit& fit, std::ostream& out) {
    out << "# K=" << fmt_double(fit.K) << " intercept=" << fmt_double(fit.intercept)
        << " r_squared=" << fmt_double(fit.r_squared) << " tau=" << fit.tau << '\n';
    out << "mean_ln_size,mean_response,count,fit_line\n";
    for (std::size_t b = 0; b < fit.bin_log_size.size(); ++b)
        out << fmt_double(fit.bin_log_size[b]) << ',' << fmt_double(fit.bin_mean_response[b])
            << ',' << fit.bin_count[b] << ','
            << fmt_double(fit.K * fit.bin_log_size[b] + fit.intercept) << '\n';
}

void write_quality(std::span<const DailyQuality> baseline, std::span<const DailyQuality> with_mm,
                   std::ostream& out) {
    out << "day,baseline_execution_ratio,baseline_mean_relative_spread,"
           "with_mm_execution_ratio,with_mm_mean_relative_spread\n";
    const std::size_t n = std::min(baseline.size(), with_mm.size());
    for (std::size_t i = 0; i < n; ++i)
        out << format_timestamp(baseline[i].day * kSecondsPerDay).substr(0, 10) << ','
            << opt(baseline[i].execution_ratio) << ',' << opt(baseline[i].mean_relative_spread)
            << ',' << opt(with_mm[i].execution_ratio) << ','
            << opt(with_mm[i].mean_relative_spread) << '\n';
}

void write_sim_series(std::span<const SimPoint> series, std::ostream& out) {
    out << "time,cash,inventory,bid,ask,mid\n";
    for (const auto& p : series)
        out << format_timestamp(p.time) << ',' << fmt_double(p.cash) << ','
            << fmt_double(p.inventory) << ',' << fmt_double(p.bid) << ',' << fmt_double(p.ask)
            << ',' << opt(p.mid) << '\n';
}

void write_adjusted_series(std::span<const A4DayRow> rows, std::ostream& out) {
    out << "day,s,s_hat,scale,Qb,Qa,xi\n";
    for (const auto& r : rows)
        out << format_timestamp(r.day * kSecondsPerDay).substr(0, 10) << ',' << fmt_double(r.s)
            << ',' << fmt_double(r.s_hat) << ',' << fmt_double(r.scale) << ','
            << fmt_double(r.q_bid) << ',' << fmt_double(r.q_ask) << ',' << fmt_double(r.xi)
            << '\n';
}

}  // namespace lobmm
