// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <addrnet/csv.hpp>
#include <addrnet/degree.hpp>
#include <addrnet/error.hpp>
#include <addrnet/matching.hpp>
#include <addrnet/probe.hpp>
#include <addrnet/report.hpp>
#include <addrnet/scenario.hpp>
#include <addrnet/simulation.hpp>
#include <addrnet/unreachable.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

using namespace addrnet;

namespace {

std::string out_dir(const std::string& flag, const std::string& fallback = ".")
{
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("ADDRNET_OUT_DIR"); env && *env) return env;
    return fallback;
}

std::ofstream open_out(const std::string& dir, const std::string& name)
{
    std::filesystem::create_directories(dir);
    const auto path = (std::filesystem::path(dir) / name).string();
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    return out;
}

std::ifstream open_in(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return in;
}

std::vector<EventLog> read_logs(const std::vector<std::string>& paths)
{
    std::vector<EventLog> logs;
    for (const auto& p : paths) logs.push_back(EventLog::read_file(p));
    return logs;
}

void add_estimator_flags(CLI::App* cmd, EstimatorParams& p)
{
    cmd->add_option("--min-message-size", p.min_message_size, "Smallest ADDR message counted");
    cmd->add_option("--future-window-low", p.future_window_low_s, "Seconds ahead a record must at least be");
    cmd->add_option("--future-window-high", p.future_window_high_s, "Seconds ahead a record may at most be");
    cmd->add_option("--min-batch-count", p.min_batch_count, "Batches need more records than this");
    cmd->add_option("--window-length", p.window_length_s, "Median window in seconds");
    cmd->add_option("--addresses-per-batch", p.addresses_per_batch, "Routable records per spam session");
    cmd->add_option("--fanout", p.fanout, "Relay fanout");
}

void add_match_flags(CLI::App* cmd, MatchParams& p)
{
    cmd->add_option("--min-future", p.min_future_s, "Seconds ahead a tuple must be");
    cmd->add_option("--min-tuples-per-source", p.min_tuples_per_source, "Tuples per source and timestamp");
    cmd->add_option("--min-shared-tuples", p.min_shared_tuples, "Shared tuples needed to link two addresses");
}

void add_probe_flags(CLI::App* cmd, ProbeParams& p, std::int64_t& wait_ms)
{
    cmd->add_option("--wait-time", wait_ms, "Milliseconds between probe steps")->default_val(3000);
    cmd->add_option("--extra-connections", p.extra_connections, "Connections opened after the first");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bitcoin addr gossip simulator and measurement toolkit"};
    app.require_subcommand(1);

    std::string config_path, out, truth_path, estimates_path, peers_path;
    std::vector<std::string> log_paths, sentinel_paths;
    std::optional<std::uint64_t> seed_override;
    EstimatorParams est;
    MatchParams match;
    ProbeParams probe;
    std::int64_t wait_ms = 3000;

    auto* simulate = app.add_subcommand("simulate", "Run a scenario and write logs and ground truth");
    simulate->add_option("--config", config_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
    simulate->add_option("--out", out, "Output directory");
    simulate->add_option("--seed-override", seed_override, "Replace the scenario seed");

    auto* estimate = app.add_subcommand("estimate", "Estimate peer degrees from monitor logs");
    estimate->add_option("--log", log_paths, "Monitor log")->required()->check(CLI::ExistingFile);
    estimate->add_option("--out", out, "Output directory");
    add_estimator_flags(estimate, est);

    auto* match_cmd = app.add_subcommand("match", "Cluster addresses that belong to one peer");
    match_cmd->add_option("--log", log_paths, "Monitor log")->required()->check(CLI::ExistingFile);
    match_cmd->add_option("--out", out, "Output directory");
    add_match_flags(match_cmd, match);

    auto* probe_cmd = app.add_subcommand("probe-analyze", "Classify probes from tester logs");
    probe_cmd->add_option("--log", log_paths, "Tester log")->required()->check(CLI::ExistingFile);
    probe_cmd->add_option("--out", out, "Output directory");
    add_probe_flags(probe_cmd, probe, wait_ms);

    double total = -1, reachable = -1, super_peers = -1, semi_super = -1, avg_out = -1, cutoff = 130;
    auto* unreach = app.add_subcommand("unreachable", "Estimate the number of unreachable peers");
    unreach->add_option("--total", total, "Counted connection slots (otherwise from --estimates or --log)");
    unreach->add_option("--estimates", estimates_path, "estimates.csv")->check(CLI::ExistingFile);
    unreach->add_option("--log", log_paths, "Monitor log")->check(CLI::ExistingFile);
    unreach->add_option("--reachable", reachable, "Unique reachable peers (otherwise from --log)");
    unreach->add_option("--super", super_peers, "Super peers (otherwise from --sentinel-log)");
    unreach->add_option("--semi-super", semi_super, "Semi-super peers (otherwise from --sentinel-log)");
    unreach->add_option("--sentinel-log", sentinel_paths, "Sentinel log")->check(CLI::ExistingFile);
    bool keep_reachable = false;
    unreach->add_flag("--keep-reachable", keep_reachable, "Count reachable remotes of sentinels as super peers");
    unreach->add_option("--avg-outgoing", avg_out, "Mean outgoing count of unreachable peers");
    unreach->add_option("--cutoff", cutoff, "Largest estimate counted as a regular peer");
    unreach->add_option("--out", out, "Output directory");
    add_estimator_flags(unreach, est);
    add_match_flags(unreach, match);

    auto* validate = app.add_subcommand("validate", "Compare estimates with ground truth");
    validate->add_option("--estimates", estimates_path, "estimates.csv")->required()->check(CLI::ExistingFile);
    validate->add_option("--truth", truth_path, "truth.csv")->required()->check(CLI::ExistingFile);

    double bin_width = 5;
    auto* report = app.add_subcommand("report", "Degree histogram and per-category medians");
    report->add_option("--estimates", estimates_path, "estimates.csv")->required()->check(CLI::ExistingFile);
    report->add_option("--peers", peers_path, "peers.csv for AS categories")->check(CLI::ExistingFile);
    report->add_option("--bin-width", bin_width, "Histogram bin width");
    report->add_option("--out", out, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            auto cfg = load_scenario(config_path);
            if (seed_override) cfg.seed = *seed_override;
            const auto result = run_scenario(cfg);
            const auto dir = out_dir(out, cfg.output_dir);
            write_sim_outputs(result, dir);
            std::cout << "wrote " << result.monitor_logs.size() << " monitor, " << result.sentinel_logs.size()
                      << " sentinel and " << result.tester_logs.size() << " tester logs to " << dir << "\n"
                      << "spam sessions " << result.stats.spam_sessions << ", evictions " << result.stats.evictions
                      << ", probes " << result.stats.probes << "\n";
        } else if (estimate->parsed()) {
            const auto logs = read_logs(log_paths);
            const auto estimates = estimate_degrees(logs, est);
            auto f = open_out(out_dir(out), "estimates.csv");
            write_estimates_csv(f, estimates);
            std::cout << estimates.size() << " daily estimates\n";
        } else if (match_cmd->parsed()) {
            const auto logs = read_logs(log_paths);
            const auto clusters = match_addresses(logs, match);
            auto f = open_out(out_dir(out), "clusters.csv");
            write_clusters_csv(f, clusters);
            const auto observed = observed_addresses(logs);
            std::cout << clusters.size() << " clusters; " << observed.size() << " addresses map to "
                      << count_unique_peers(observed, clusters) << " peers\n";
        } else if (probe_cmd->parsed()) {
            probe.wait_time = SimTime{wait_ms};
            probe.validate();
            std::vector<std::vector<ProbeOutcome>> per_tester;
            std::vector<ProbeOutcome> all;
            for (const auto& log : read_logs(log_paths)) {
                per_tester.push_back(analyze_probe_log(log, probe));
                all.insert(all.end(), per_tester.back().begin(), per_tester.back().end());
            }
            const auto summary = summarize_probes(per_tester);
            const auto dir = out_dir(out);
            auto f = open_out(dir, "probe.csv");
            write_probe_csv(f, all);
            auto g = open_out(dir, "probe_summary.csv");
            write_probe_summary_csv(g, summary);
            write_probe_summary_csv(std::cout, summary);
        } else if (unreach->parsed()) {
            std::vector<EventLog> logs = read_logs(log_paths);
            if (total < 0) {
                std::vector<DegreeEstimate> estimates;
                if (!estimates_path.empty()) {
                    auto in = open_in(estimates_path);
                    estimates = read_estimates_csv(in, estimates_path);
                } else if (!logs.empty()) {
                    estimates = estimate_degrees(logs, est);
                } else {
                    throw ConfigError("--total, --estimates or --log is required");
                }
                total = counted_slots(estimates, cutoff);
            }
            if (reachable < 0) {
                if (logs.empty()) throw ConfigError("--reachable or --log is required");
                const auto observed = observed_addresses(logs);
                reachable = static_cast<double>(count_unique_peers(observed, match_addresses(logs, match)));
            }
            if (super_peers < 0 || semi_super < 0) {
                if (sentinel_paths.empty()) throw ConfigError("--super and --semi-super, or --sentinel-log, are required");
                // Addresses the monitors dialed are reachable peers, not super peers.
                const auto counts =
                    count_super_peers(read_logs(sentinel_paths), 3'600'000,
                                      keep_reachable ? std::set<NetAddress>{} : observed_addresses(logs));
                if (super_peers < 0) super_peers = counts.super_peers;
                if (semi_super < 0) semi_super = counts.semi_super_peers;
            }
            if (avg_out < 0) avg_out = avg_outgoing(default_client_profile());
            UnreachableInputs in;
            in.reachable = reachable;
            in.super_peers = super_peers;
            in.semi_super_peers = semi_super;
            in.avg_outgoing = avg_out;
            const auto b = estimate_unreachable(total, in);
            auto f = open_out(out_dir(out), "unreachable.csv");
            write_unreachable_csv(f, b);
            write_unreachable_csv(std::cout, b);
        } else if (validate->parsed()) {
            auto ein = open_in(estimates_path);
            const auto estimates = read_estimates_csv(ein, estimates_path);
            auto tin = open_in(truth_path);
            const auto truth = read_truth_csv(tin, truth_path);
            const auto errors = estimate_errors(estimates, truth);
            std::cout << "address,day,n_p,truth,abs_error\n";
            for (std::size_t i = 0; i < estimates.size(); ++i) {
                const auto& e = estimates[i];
                write_csv_row(std::cout, {e.subject.to_string(), std::to_string(e.day), format_double(e.estimate),
                                          format_double(truth.at({e.subject, e.day})), format_double(errors[i])});
            }
            std::cout << "MAPE " << format_double(100 * validate_estimates(estimates, truth), 3) << " %\n";
        } else if (report->parsed()) {
            auto ein = open_in(estimates_path);
            const auto estimates = read_estimates_csv(ein, estimates_path);
            std::map<NetAddress, AsCategory> categories;
            if (!peers_path.empty()) {
                auto pin = open_in(peers_path);
                for (const auto& p : read_peers_csv(pin, peers_path)) {
                    for (const auto& a : p.addresses) categories[a] = p.as.category;
                }
            }
            const auto rows = degree_histogram(estimates, bin_width, peers_path.empty() ? nullptr : &categories);
            const auto stats = category_stats(estimates, categories);
            const auto dir = out_dir(out);
            auto f = open_out(dir, "histogram.csv");
            write_histogram_csv(f, rows);
            auto g = open_out(dir, "category_stats.csv");
            write_category_stats_csv(g, stats);
            write_category_stats_csv(std::cout, stats);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
