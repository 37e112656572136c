// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <addrnet/csv.hpp>
#include <addrnet/error.hpp>
#include <addrnet/unreachable.hpp>

#include <algorithm>
#include <iterator>
#include <map>
#include <set>

namespace addrnet {

std::vector<ClientShare> default_client_profile()
{
    return {{"core", 10, 0.784}, {"bitcoinj", 12, 0.065}, {"bread", 3, 0.033}, {"bcoin", 8, 0.028}};
}

double avg_outgoing(std::span<const ClientShare> profile)
{
    if (profile.empty()) throw ConfigError("client profile is empty");
    double shares = 0, weighted = 0;
    for (const auto& c : profile) {
        if (!(c.share > 0)) throw ConfigError("client '" + c.client + "' has a non-positive share");
        shares += c.share;
        weighted += c.share * c.outgoing;
    }
    return weighted / shares;
}

UnreachableBreakdown estimate_unreachable(double total_slots, const UnreachableInputs& in)
{
    if (in.reachable < 0 || in.super_peers < 0 || in.semi_super_peers < 0) {
        throw ConfigError("peer counts must be non-negative");
    }
    if (!(in.avg_outgoing > 0)) throw ConfigError("avg_outgoing must be positive");

    UnreachableBreakdown b;
    b.total = total_slots;
    b.reachable = 2 * in.reachable_outgoing * in.reachable;
    b.super_peers = in.super_peers * in.reachable;
    b.semi_super_peers = in.semi_super_peers * in.reachable / 2;
    b.residual = b.total - b.reachable - b.super_peers - b.semi_super_peers;
    if (b.residual < 0) {
        throw Error("inconsistent inputs: attributed slots exceed the total by " + format_double(-b.residual));
    }
    b.avg_outgoing = in.avg_outgoing;
    b.unreachable = b.residual / b.avg_outgoing;
    return b;
}

double counted_slots(std::span<const DegreeEstimate> estimates, double cutoff)
{
    std::map<std::int64_t, double> per_day;
    for (const auto& e : estimates) {
        auto& sum = per_day[e.day];
        if (e.estimate <= cutoff) sum += e.estimate;
    }
    if (per_day.empty()) return 0;
    double total = 0;
    for (const auto& [day, sum] : per_day) total += sum;
    return total / static_cast<double>(per_day.size());
}

namespace {

struct Interval {
    NetAddress remote;
    std::int64_t open_ms;
    std::int64_t close_ms;
};

std::vector<Interval> connection_intervals(const EventLog& log, std::int64_t end_ms)
{
    std::map<ConnId, Interval> open;
    std::vector<Interval> out;
    for (const auto& e : log.events()) {
        if (e.kind == EventKind::ConnOpen) {
            open[e.conn] = Interval{e.remote, e.time_ms, end_ms + 1};
        } else if (e.kind == EventKind::ConnClose) {
            auto it = open.find(e.conn);
            if (it == open.end()) continue;
            it->second.close_ms = e.time_ms;
            out.push_back(it->second);
            open.erase(it);
        }
    }
    for (auto& [id, iv] : open) out.push_back(iv);
    return out;
}

}  // namespace

SuperPeerCounts count_super_peers(std::span<const EventLog> sentinel_logs, std::int64_t interval_ms,
                                  const std::set<NetAddress>& known_reachable)
{
    if (sentinel_logs.size() < 2) throw ConfigError("count_super_peers needs at least two sentinel logs");
    if (interval_ms <= 0) throw ConfigError("sample interval must be positive");

    std::int64_t end_ms = 0;
    for (const auto& log : sentinel_logs) {
        if (!log.empty()) end_ms = std::max(end_ms, log.events().back().time_ms);
    }
    std::vector<std::vector<Interval>> intervals;
    for (const auto& log : sentinel_logs) intervals.push_back(connection_intervals(log, end_ms));

    double all_sum = 0, pair_sum = 0;
    std::size_t samples = 0;
    for (std::int64_t t = 0; t <= end_ms; t += interval_ms) {
        std::vector<std::set<NetAddress>> live(intervals.size());
        for (std::size_t i = 0; i < intervals.size(); ++i) {
            for (const auto& iv : intervals[i]) {
                if (iv.open_ms <= t && t < iv.close_ms && !known_reachable.contains(iv.remote)) live[i].insert(iv.remote);
            }
        }
        std::set<NetAddress> pair;
        std::set_intersection(live[0].begin(), live[0].end(), live[1].begin(), live[1].end(),
                              std::inserter(pair, pair.end()));
        std::set<NetAddress> all = pair;
        for (std::size_t i = 2; i < live.size(); ++i) {
            std::set<NetAddress> next;
            std::set_intersection(all.begin(), all.end(), live[i].begin(), live[i].end(),
                                  std::inserter(next, next.end()));
            all = std::move(next);
        }
        all_sum += static_cast<double>(all.size());
        pair_sum += static_cast<double>(pair.size());
        ++samples;
    }
    const double s = all_sum / static_cast<double>(samples);
    return {s, pair_sum / static_cast<double>(samples) - s};
}

void write_unreachable_csv(std::ostream& out, const UnreachableBreakdown& b)
{
    out << "total,reachable,super,semi_super,residual,avg_outgoing,unreachable\n";
    write_csv_row(out, {format_double(b.total), format_double(b.reachable), format_double(b.super_peers),
                        format_double(b.semi_super_peers), format_double(b.residual),
                        format_double(b.avg_outgoing), format_double(b.unreachable)});
}

}  // namespace addrnet
