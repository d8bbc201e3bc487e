#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "lobmm/market_stats.hpp"
#include "lobmm/mm_sim.hpp"
#include "lobmm/price_adjust.hpp"
#include "lobmm/types.hpp"

namespace lobmm {

// Plot-ready CSV tables. Numbers are written with full round-trip precision
// so identical runs produce byte-identical files.

void write_execution_log(std::span<const Execution> executions, std::ostream& out);
void write_snapshot_table(std::span<const BookSnapshot> snapshots, std::ostream& out);
void write_depth_json(const BookSnapshot& snapshot, std::ostream& out);
void write_daily_stats(std::span<const DailyStats> stats, std::ostream& out);
void write_histogram(std::span<const double> samples, std::size_t n_bins, std::ostream& out);
void write_profile(const VolumeProfile& profile, std::ostream& out);
void write_ecdf(std::span<const std::pair<double, double>> tail, std::ostream& out);
void write_impact(const ImpactFit& fit, std::ostream& out);
void write_quality(std::span<const DailyQuality> baseline, std::span<const DailyQuality> with_mm,
                   std::ostream& out);
void write_sim_series(std::span<const SimPoint> series, std::ostream& out);
void write_adjusted_series(std::span<const A4DayRow> rows, std::ostream& out);

// %.17g, locale-independent
std::string fmt_double(double v);

}  // namespace lobmm
