// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <addrnet/degree.hpp>
#include <addrnet/event_log.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace addrnet {

struct MatchParams {
    std::int64_t min_future_s = 300;
    std::size_t min_tuples_per_source = 10;
    std::size_t min_shared_tuples = 5;

    void validate() const;
};

struct PairEvidence {
    NetAddress a;
    NetAddress b;
    std::size_t shared = 0;
};

/// Addresses believed to belong to one peer, sorted ascending.
struct PeerCluster {
    std::vector<NetAddress> addresses;
    std::vector<PairEvidence> evidence;  // the links that built this cluster
};

/**
 * Links source addresses that relayed the same spam records. A record counts
 * for a source when it is stamped at least min_future_s after receipt and
 * the same observer received at least min_tuples_per_source such records
 * with that timestamp from that source. Two sources are linked when their
 * record sets share at least min_shared_tuples; clusters are the connected
 * components. Sources without any link are not reported. Output is sorted by
 * first address.
 */
std::vector<PeerCluster> match_addresses(std::span<const EventLog> logs, const MatchParams& params);

/// Remote addresses of every connection the observers opened.
std::set<NetAddress> observed_addresses(std::span<const EventLog> logs);

/// Distinct peers behind `observed` once each cluster is counted as one peer.
std::size_t count_unique_peers(const std::set<NetAddress>& observed, std::span<const PeerCluster> clusters);

/**
 * Mean relative deviation of member estimates from their cluster mean,
 * averaged over clusters with at least two estimated members. Each address
 * contributes its estimate averaged over all days. nullopt when nothing
 * qualifies.
 */
std::optional<double> cluster_estimate_consistency(std::span<const PeerCluster> clusters,
                                                   std::span<const DegreeEstimate> estimates);

// clusters.csv: cluster,address
void write_clusters_csv(std::ostream& out, std::span<const PeerCluster> clusters);

}  // namespace addrnet
