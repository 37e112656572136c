// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <addrnet/csv.hpp>
#include <addrnet/error.hpp>
#include <addrnet/matching.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

namespace addrnet {

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x)
    {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a > b) std::swap(a, b);
        parent_[b] = a;
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

void MatchParams::validate() const
{
    if (min_future_s < 0) throw ConfigError("min_future must be non-negative");
    if (min_tuples_per_source == 0) throw ConfigError("min_tuples_per_source must be positive");
    if (min_shared_tuples == 0) throw ConfigError("min_shared_tuples must be positive");
}

std::vector<PeerCluster> match_addresses(std::span<const EventLog> logs, const MatchParams& params)
{
    params.validate();

    // Per observer: (source, ts) -> records. Qualified groups feed the per-source sets.
    std::map<NetAddress, std::set<AddrRecord>> by_source;
    for (const auto& log : logs) {
        std::map<std::pair<NetAddress, std::int64_t>, std::set<AddrRecord>> groups;
        for (const auto& e : log.events()) {
            if (e.kind != EventKind::AddrMsg) continue;
            const std::int64_t received = e.time_seconds();
            for (const auto& r : e.records) {
                if (r.timestamp.seconds - received < params.min_future_s) continue;
                groups[{e.remote, r.timestamp.seconds}].insert(r);
            }
        }
        for (auto& [key, records] : groups) {
            if (records.size() < params.min_tuples_per_source) continue;
            by_source[key.first].merge(records);
        }
    }

    std::vector<NetAddress> sources;
    sources.reserve(by_source.size());
    for (const auto& [src, _] : by_source) sources.push_back(src);

    std::unordered_map<AddrRecord, std::vector<std::uint32_t>> holders;
    for (std::uint32_t i = 0; i < sources.size(); ++i) {
        for (const auto& r : by_source[sources[i]]) holders[r].push_back(i);
    }
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> shared;
    for (const auto& [r, list] : holders) {
        for (std::size_t x = 0; x < list.size(); ++x) {
            for (std::size_t y = x + 1; y < list.size(); ++y) ++shared[{list[x], list[y]}];
        }
    }

    DisjointSets sets(sources.size());
    std::vector<PairEvidence> links;
    for (const auto& [pair, n] : shared) {
        if (n < params.min_shared_tuples) continue;
        sets.unite(pair.first, pair.second);
        links.push_back({sources[pair.first], sources[pair.second], n});
    }

    std::map<std::size_t, PeerCluster> components;
    for (const auto& link : links) {
        auto it = std::lower_bound(sources.begin(), sources.end(), link.a);
        components[sets.find(static_cast<std::size_t>(it - sources.begin()))].evidence.push_back(link);
    }
    for (auto& [root, cluster] : components) {
        std::set<NetAddress> members;
        for (const auto& link : cluster.evidence) {
            members.insert(link.a);
            members.insert(link.b);
        }
        cluster.addresses.assign(members.begin(), members.end());
    }

    std::vector<PeerCluster> out;
    out.reserve(components.size());
    for (auto& [root, cluster] : components) out.push_back(std::move(cluster));
    // Roots are the smallest member index and sources are sorted, so `out` is ordered by first address.
    return out;
}

std::set<NetAddress> observed_addresses(std::span<const EventLog> logs)
{
    std::set<NetAddress> out;
    for (const auto& log : logs) {
        for (const auto& e : log.events()) {
            if (e.kind == EventKind::ConnOpen && e.direction == Direction::Outbound) out.insert(e.remote);
        }
    }
    return out;
}

std::size_t count_unique_peers(const std::set<NetAddress>& observed, std::span<const PeerCluster> clusters)
{
    std::size_t merged_away = 0;
    for (const auto& c : clusters) {
        std::size_t seen = 0;
        for (const auto& a : c.addresses) seen += observed.contains(a) ? 1 : 0;
        if (seen > 1) merged_away += seen - 1;
    }
    return observed.size() - merged_away;
}

std::optional<double> cluster_estimate_consistency(std::span<const PeerCluster> clusters,
                                                   std::span<const DegreeEstimate> estimates)
{
    // Each address is represented by its mean estimate over all days.
    std::map<NetAddress, std::pair<double, std::size_t>> sums;
    for (const auto& e : estimates) {
        auto& [sum, n] = sums[e.subject];
        sum += e.estimate;
        ++n;
    }

    double total = 0;
    std::size_t used = 0;
    for (const auto& c : clusters) {
        std::vector<double> values;
        for (const auto& a : c.addresses) {
            auto it = sums.find(a);
            if (it != sums.end()) values.push_back(it->second.first / static_cast<double>(it->second.second));
        }
        if (values.size() < 2) continue;
        const double n = static_cast<double>(values.size());
        const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
        double dev = 0;
        for (double v : values) dev += std::abs(v - mean);
        total += dev / n / mean;
        ++used;
    }
    if (used == 0) return std::nullopt;
    return total / static_cast<double>(used);
}

void write_clusters_csv(std::ostream& out, std::span<const PeerCluster> clusters)
{
    out << "cluster,address\n";
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        for (const auto& a : clusters[i].addresses) write_csv_row(out, {std::to_string(i), a.to_string()});
    }
}

}  // namespace addrnet
