// Command-line front end: ingestion, replay, statistics, calibration, MM
// simulation, bootstrap replication and counterfactual price adjustment.
// Every run writes a manifest.json echoing the fully resolved configuration;
// the manifest is written last, so its presence marks a complete run.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lobmm/bootstrap.hpp"
#include "lobmm/exports.hpp"
#include "lobmm/ingest.hpp"
#include "lobmm/lob_engine.hpp"
#include "lobmm/market_stats.hpp"
#include "lobmm/mm_sim.hpp"
#include "lobmm/price_adjust.hpp"
#include "lobmm/quoting.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::string input;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string format = "auto";  // csv | jsonl | auto (by extension)

    // model parameters
    double gamma = 0.1;
    double sigma = 2.38;
    double K = 0.55;
    double alpha = 8.87e-5;
    double lambda = 2.0;
    double A = 1.0;
    double kappa = 1.5;
    std::string intensity = "informal";  // informal | classical
    bool legacy_spread = false;

    // simulation
    double c0 = 1e5;
    double q0 = 0.0;
    std::string fill_mode = "flow-cross";  // flow-cross | poisson
    std::string sigma_mode = "fixed";      // fixed | rolling
    int window_days = 10;
    double quote_size = 100.0;
    double dt = 0.01;
    int expiry_days = 7;

    // bootstrap / adjustment
    int n_replicates = 1000;
    std::int64_t insertion_day = -1;  // -1: last data day
    int post_data_days = 15;
    int elasticity_window = 30;

    // statistics
    int tau = 1;
    int bins = 20;
};

std::uint64_t fnv1a_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::uint64_t h = 1469598103934665603ull;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

lobmm::InputFormat resolve_format(const Options& opt) {
    if (opt.format == "csv") return lobmm::InputFormat::csv;
    if (opt.format == "jsonl") return lobmm::InputFormat::jsonl;
    if (opt.format == "auto") {
        const auto ext = fs::path(opt.input).extension().string();
        if (ext == ".jsonl" || ext == ".ndjson" || ext == ".json")
            return lobmm::InputFormat::jsonl;
        return lobmm::InputFormat::csv;
    }
    throw std::runtime_error("unknown input format '" + opt.format + "'");
}

lobmm::ParseResult load_orders(const Options& opt) {
    if (opt.input.empty()) throw std::runtime_error("--input is required");
    std::ifstream in(opt.input);
    if (!in) throw std::runtime_error("cannot open input '" + opt.input + "'");
    return lobmm::parse_orders(in, resolve_format(opt));
}

lobmm::QuoteParams quote_params(const Options& opt) {
    lobmm::QuoteParams p;
    p.gamma = opt.gamma;
    p.sigma = opt.sigma;
    p.legacy_main_text_spread = opt.legacy_spread;
    if (opt.intensity == "classical")
        p.intensity = lobmm::ClassicalIntensity{opt.A, opt.kappa};
    else if (opt.intensity == "informal")
        p.intensity = lobmm::InformalIntensity{opt.lambda, opt.alpha, opt.K};
    else
        throw std::runtime_error("unknown intensity model '" + opt.intensity + "'");
    return p;
}

lobmm::SimConfig sim_config(const Options& opt) {
    lobmm::SimConfig cfg;
    cfg.c0 = opt.c0;
    cfg.q0 = opt.q0;
    cfg.quote = quote_params(opt);
    cfg.sigma_mode = opt.sigma_mode == "rolling" ? lobmm::SigmaMode::rolling
                                                 : lobmm::SigmaMode::fixed;
    cfg.window_days = opt.window_days;
    if (opt.fill_mode == "poisson")
        cfg.fill_mode = lobmm::FillMode::poisson;
    else if (opt.fill_mode == "flow-cross")
        cfg.fill_mode = lobmm::FillMode::flow_cross;
    else
        throw std::runtime_error("unknown fill mode '" + opt.fill_mode + "'");
    cfg.dt = opt.dt;
    cfg.quote_size = opt.quote_size;
    cfg.expiry_seconds = static_cast<std::int64_t>(opt.expiry_days) * lobmm::kSecondsPerDay;
    return cfg;
}

json resolved_config(const Options& opt) {
    return json{
        {"input", opt.input},
        {"out", opt.out_dir},
        {"format", opt.format},
        {"gamma", opt.gamma},
        {"sigma", opt.sigma},
        {"K", opt.K},
        {"alpha", opt.alpha},
        {"lambda", opt.lambda},
        {"A", opt.A},
        {"kappa", opt.kappa},
        {"intensity", opt.intensity},
        {"legacy_spread", opt.legacy_spread},
        {"c0", opt.c0},
        {"q0", opt.q0},
        {"fill_mode", opt.fill_mode},
        {"sigma_mode", opt.sigma_mode},
        {"window_days", opt.window_days},
        {"quote_size", opt.quote_size},
        {"dt", opt.dt},
        {"expiry_days", opt.expiry_days},
        {"n_replicates", opt.n_replicates},
        {"insertion_day", opt.insertion_day},
        {"post_data_days", opt.post_data_days},
        {"elasticity_window", opt.elasticity_window},
        {"tau", opt.tau},
        {"bins", opt.bins},
    };
}

// Tracks the files a command produced and finishes with the manifest.
class RunWriter {
public:
    RunWriter(const Options& opt, std::string command) : opt_(opt), command_(std::move(command)) {
        fs::create_directories(opt.out_dir);
    }

    template <typename Fn>
    void write(const std::string& name, Fn&& fn) {
        const fs::path path = fs::path(opt_.out_dir) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
        fn(out);
        if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
        outputs_.push_back(name);
    }

    void write_json(const std::string& name, const json& value) {
        write(name, [&](std::ostream& out) { out << value.dump(2) << "\n"; });
    }

    void finish() {
        json manifest{
            {"command", command_},
            {"seed", opt_.seed},
            {"seed_generated", !opt_.seed_given},
            {"config", resolved_config(opt_)},
            {"outputs", outputs_},
        };
        if (!opt_.input.empty())
            manifest["input_digest"] = hex64(fnv1a_digest(opt_.input));
        write_json("manifest.json", manifest);
        std::cout << command_ << ": wrote " << outputs_.size() << " file(s) to " << opt_.out_dir
                  << "\n";
    }

private:
    const Options& opt_;
    std::string command_;
    std::vector<std::string> outputs_;
};

std::vector<lobmm::OrderRecord> sorted_orders(std::vector<lobmm::DayPartition>& days) {
    std::vector<lobmm::OrderRecord> all;
    for (const auto& d : days) all.insert(all.end(), d.orders.begin(), d.orders.end());
    return all;
}

void write_fills(std::span<const lobmm::MMFill> fills, std::ostream& out) {
    out << "time,price,volume,mm_sign\n";
    for (const auto& f : fills)
        out << f.time << ',' << lobmm::fmt_double(f.price) << ',' << lobmm::fmt_double(f.volume)
            << ',' << f.mm_sign << '\n';
}

int cmd_ingest(const Options& opt) {
    auto parsed = load_orders(opt);
    RunWriter run(opt, "ingest");
    run.write("orders.csv",
              [&](std::ostream& out) { lobmm::serialize_orders(parsed.orders, out); });
    run.write("rejects.csv",
              [&](std::ostream& out) { lobmm::write_reject_report(parsed.rejects, out); });
    run.write_json("summary.json", json{{"orders", parsed.orders.size()},
                                        {"rejects", parsed.rejects.size()}});
    run.finish();
    return 0;
}

int cmd_replay(const Options& opt) {
    auto parsed = load_orders(opt);
    auto days = lobmm::partition_by_day(parsed.orders);
    auto orders = sorted_orders(days);
    auto rep = lobmm::replay(orders, static_cast<std::int64_t>(opt.expiry_days) *
                                         lobmm::kSecondsPerDay);

    RunWriter run(opt, "replay");
    run.write("executions.csv",
              [&](std::ostream& out) { lobmm::write_execution_log(rep.executions, out); });
    run.write("snapshots.csv",
              [&](std::ostream& out) { lobmm::write_snapshot_table(rep.snapshots, out); });
    const lobmm::BookSnapshot last =
        rep.snapshots.empty() ? lobmm::BookSnapshot{} : rep.snapshots.back();
    run.write("depth.json", [&](std::ostream& out) { lobmm::write_depth_json(last, out); });
    run.write_json("summary.json", json{{"orders", orders.size()},
                                        {"executions", rep.executions.size()},
                                        {"rejected", rep.rejected_count},
                                        {"executed_volume", rep.ledger.executed()}});
    run.finish();
    return 0;
}

int cmd_stats(const Options& opt) {
    auto parsed = load_orders(opt);
    if (parsed.orders.empty()) throw std::runtime_error("no orders");
    auto days = lobmm::partition_by_day(parsed.orders);
    auto orders = sorted_orders(days);
    const std::int64_t expiry =
        static_cast<std::int64_t>(opt.expiry_days) * lobmm::kSecondsPerDay;
    auto rep = lobmm::replay(orders, expiry);

    // Daily statistics over the continuous book: slice the event-aligned
    // snapshots per day and bucket executions by calendar day.
    std::vector<lobmm::DailyStats> daily;
    std::size_t pos = 0;
    for (const auto& day : days) {
        std::span<const lobmm::BookSnapshot> snaps(rep.snapshots.data() + pos,
                                                   day.orders.size());
        std::vector<lobmm::Execution> day_execs;
        for (const auto& e : rep.executions)
            if (lobmm::day_of(e.time) == day.day) day_execs.push_back(e);
        daily.push_back(lobmm::daily_stats(day, day_execs, snaps));
        pos += day.orders.size();
    }

    RunWriter run(opt, "stats");
    run.write("daily_stats.csv",
              [&](std::ostream& out) { lobmm::write_daily_stats(daily, out); });

    std::vector<double> order_sizes;
    for (const auto& o : orders) order_sizes.push_back(o.volume);
    run.write("order_size_hist.csv", [&](std::ostream& out) {
        lobmm::write_histogram(order_sizes, static_cast<std::size_t>(opt.bins), out);
    });
    run.write("order_size_ecdf.csv", [&](std::ostream& out) {
        lobmm::write_ecdf(lobmm::ecdf_tail(order_sizes), out);
    });
    if (!rep.executions.empty()) {
        std::vector<double> exec_sizes;
        for (const auto& e : rep.executions) exec_sizes.push_back(e.volume);
        run.write("exec_size_ecdf.csv", [&](std::ostream& out) {
            lobmm::write_ecdf(lobmm::ecdf_tail(exec_sizes), out);
        });
    }

    const std::vector<double> edges{0.0,  0.005, 0.01, 0.02, 0.03,
                                    0.05, 0.08,  0.12, 0.2,  0.35};
    for (auto [side, name] : {std::pair{lobmm::Side::bid, "profile_bid.csv"},
                              std::pair{lobmm::Side::ask, "profile_ask.csv"}}) {
        try {
            auto prof = lobmm::volume_profile(rep.snapshots, side, edges);
            run.write(name, [&](std::ostream& out) { lobmm::write_profile(prof, out); });
        } catch (const std::exception& e) {
            std::cerr << "warning: skipping " << name << ": " << e.what() << "\n";
        }
    }
    try {
        auto fit = lobmm::price_impact(rep, orders, opt.tau, opt.bins);
        run.write("impact.csv", [&](std::ostream& out) { lobmm::write_impact(fit, out); });
    } catch (const std::exception& e) {
        std::cerr << "warning: skipping impact.csv: " << e.what() << "\n";
    }
    run.finish();
    return 0;
}

int cmd_calibrate(const Options& opt) {
    auto parsed = load_orders(opt);
    auto days = lobmm::partition_by_day(parsed.orders);
    auto orders = sorted_orders(days);
    auto rep = lobmm::replay(orders, static_cast<std::int64_t>(opt.expiry_days) *
                                         lobmm::kSecondsPerDay);
    auto cal = lobmm::calibrate_intensity(rep.executions);

    RunWriter run(opt, "calibrate");
    run.write_json("calibration.json", json{{"lambda", cal.lambda},
                                            {"alpha", cal.alpha},
                                            {"size_fit_rate", cal.size_fit.rate},
                                            {"size_fit_ks", cal.size_fit.ks_stat},
                                            {"size_fit_n", cal.size_fit.n}});
    run.finish();
    return 0;
}

int cmd_mm_sim(const Options& opt) {
    std::vector<lobmm::DayPartition> days;
    if (!opt.input.empty()) {
        auto parsed = load_orders(opt);
        days = lobmm::partition_by_day(parsed.orders);
    }
    auto result = lobmm::run_simulation(days, sim_config(opt), opt.seed);

    RunWriter run(opt, "mm-sim");
    run.write("quality.csv", [&](std::ostream& out) {
        lobmm::write_quality(result.baseline_quality, result.with_mm_quality, out);
    });
    run.write("series.csv",
              [&](std::ostream& out) { lobmm::write_sim_series(result.series, out); });
    run.write("fills.csv", [&](std::ostream& out) { write_fills(result.fills, out); });
    run.write_json("summary.json", json{{"final_cash", result.final_cash},
                                        {"final_inventory", result.final_inventory},
                                        {"final_wealth", result.final_wealth},
                                        {"fills", result.fills.size()},
                                        {"solver_failures", result.solver_failures}});
    run.finish();
    return 0;
}

int cmd_bootstrap(const Options& opt) {
    auto parsed = load_orders(opt);
    if (parsed.orders.empty()) throw std::runtime_error("no orders");
    auto days = lobmm::partition_by_day(parsed.orders);
    const auto cfg = sim_config(opt);

    lobmm::ReplicatePlan plan{opt.seed, opt.n_replicates, {}};
    auto outcomes = lobmm::run_replicates(
        plan, days, [&](int, const std::vector<lobmm::DayPartition>& resampled) {
            auto sim = lobmm::run_simulation(resampled, cfg, opt.seed);
            return std::pair{sim.final_cash, sim.final_wealth};
        });

    std::vector<double> final_cash;
    std::size_t failures = 0;
    RunWriter run(opt, "bootstrap");
    run.write("replicates.csv", [&](std::ostream& out) {
        out << "replicate,ok,final_cash,final_wealth,error\n";
        for (const auto& o : outcomes) {
            out << o.index << ',' << (o.ok ? 1 : 0) << ',';
            if (o.ok)
                out << lobmm::fmt_double(o.value.first) << ','
                    << lobmm::fmt_double(o.value.second) << ",";
            else
                out << ",,\"" << o.error << "\"";
            out << '\n';
        }
    });
    for (const auto& o : outcomes) {
        if (o.ok)
            final_cash.push_back(o.value.first);
        else
            ++failures;
    }
    if (!final_cash.empty())
        run.write("final_cash_hist.csv", [&](std::ostream& out) {
            lobmm::write_histogram(final_cash, static_cast<std::size_t>(opt.bins), out);
        });
    double mean = 0.0;
    for (double c : final_cash) mean += c;
    if (!final_cash.empty()) mean /= static_cast<double>(final_cash.size());
    run.write_json("summary.json", json{{"replicates", outcomes.size()},
                                        {"failures", failures},
                                        {"mean_final_cash", mean}});
    run.finish();
    return failures == outcomes.size() && !outcomes.empty() ? 1 : 0;
}

int cmd_adjust(const Options& opt) {
    auto parsed = load_orders(opt);
    if (parsed.orders.empty()) throw std::runtime_error("no orders");
    auto days = lobmm::partition_by_day(parsed.orders);

    lobmm::A4Config cfg;
    cfg.insertion_day = opt.insertion_day < 0 ? days.size() - 1
                                              : static_cast<std::size_t>(opt.insertion_day);
    cfg.post_data_days = opt.post_data_days;
    cfg.sim = sim_config(opt);
    cfg.elasticity_window = opt.elasticity_window;
    cfg.seed = opt.seed;
    auto result = lobmm::run_a4_loop(days, cfg);

    RunWriter run(opt, "adjust");
    run.write("adjusted.csv",
              [&](std::ostream& out) { lobmm::write_adjusted_series(result.rows, out); });
    run.write_json("summary.json",
                   json{{"days", result.rows.size()},
                        {"insertion_day", cfg.insertion_day},
                        {"final_scale", result.rows.empty() ? 1.0 : result.rows.back().scale},
                        {"mm_cash", result.mm.cash},
                        {"mm_inventory", result.mm.inventory}});
    run.finish();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    Options opt;
    CLI::App app{"limit-order-book model of an informal currency market"};
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--input", opt.input, "input order file (csv or jsonl)");
    app.add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    auto* seed_opt = app.add_option("--seed", opt.seed, "RNG seed (generated when omitted)");
    app.set_config("--config", "", "flat key=value configuration file");
    app.add_option("--format", opt.format, "csv | jsonl | auto")->capture_default_str();

    app.add_option("--gamma", opt.gamma, "risk aversion")->capture_default_str();
    app.add_option("--sigma", opt.sigma, "daily mid volatility")->capture_default_str();
    app.add_option("--impact-k", opt.K, "price-impact slope K")->capture_default_str();
    app.add_option("--alpha", opt.alpha, "size-decay rate alpha")->capture_default_str();
    app.add_option("--lambda", opt.lambda, "market orders per day")->capture_default_str();
    app.add_option("--intensity-a", opt.A, "classical intensity A")->capture_default_str();
    app.add_option("--kappa", opt.kappa, "classical intensity decay")->capture_default_str();
    app.add_option("--intensity", opt.intensity, "informal | classical")->capture_default_str();
    app.add_flag("--legacy-spread", opt.legacy_spread,
                 "use the 2/gamma spread coefficient");

    app.add_option("--c0", opt.c0, "initial cash, CUP")->capture_default_str();
    app.add_option("--q0", opt.q0, "initial inventory, USD")->capture_default_str();
    app.add_option("--fill-mode", opt.fill_mode, "flow-cross | poisson")->capture_default_str();
    app.add_option("--sigma-mode", opt.sigma_mode, "fixed | rolling")->capture_default_str();
    app.add_option("--window-days", opt.window_days, "rolling sigma window")
        ->capture_default_str();
    app.add_option("--quote-size", opt.quote_size, "quote size per side, USD")
        ->capture_default_str();
    app.add_option("--dt", opt.dt, "poisson step, days")->capture_default_str();
    app.add_option("--expiry-days", opt.expiry_days, "resting order lifetime")
        ->capture_default_str();

    app.add_option("--n-replicates", opt.n_replicates, "bootstrap replicates")
        ->capture_default_str();
    app.add_option("--insertion-day", opt.insertion_day,
                   "MM insertion day index (-1: last data day)")
        ->capture_default_str();
    app.add_option("--post-data-days", opt.post_data_days, "bootstrap days past the data end")
        ->capture_default_str();
    app.add_option("--elasticity-window", opt.elasticity_window, "rolling OLS window, days")
        ->capture_default_str();

    app.add_option("--tau", opt.tau, "impact lag, in book events")->capture_default_str();
    app.add_option("--bins", opt.bins, "histogram / impact bins")->capture_default_str();

    auto* c_ingest = app.add_subcommand("ingest", "parse and normalize an order file");
    auto* c_replay = app.add_subcommand("replay", "replay orders through the book");
    auto* c_stats = app.add_subcommand("stats", "daily microstructure statistics");
    auto* c_calibrate = app.add_subcommand("calibrate", "fit Lambda and alpha from executions");
    auto* c_mm_sim = app.add_subcommand("mm-sim", "market-maker simulation");
    auto* c_bootstrap = app.add_subcommand("bootstrap", "bootstrap Monte Carlo replication");
    auto* c_adjust = app.add_subcommand("adjust", "counterfactual price adjustment");

    CLI11_PARSE(app, argc, argv);

    opt.seed_given = seed_opt->count() > 0;
    if (!opt.seed_given) {
        std::random_device rd;
        opt.seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
    }

    try {
        if (c_ingest->parsed()) return cmd_ingest(opt);
        if (c_replay->parsed()) return cmd_replay(opt);
        if (c_stats->parsed()) return cmd_stats(opt);
        if (c_calibrate->parsed()) return cmd_calibrate(opt);
        if (c_mm_sim->parsed()) return cmd_mm_sim(opt);
        if (c_bootstrap->parsed()) return cmd_bootstrap(opt);
        if (c_adjust->parsed()) return cmd_adjust(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
