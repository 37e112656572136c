// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <addrnet/degree.hpp>
#include <addrnet/event_log.hpp>

#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace addrnet {

/// One client implementation's outgoing connection count and its share of unreachable peers.
struct ClientShare {
    std::string client;
    double outgoing = 0;
    double share = 0;
};

/// Bitcoin Core 10, BitcoinJ 12, Bread 3, bcoin 8 with their observed user-agent shares.
std::vector<ClientShare> default_client_profile();

/// Share-weighted mean outgoing count after renormalizing shares to sum 1.
/// Throws ConfigError for an empty profile or a non-positive share.
double avg_outgoing(std::span<const ClientShare> profile);

struct UnreachableInputs {
    double reachable = 0;         // R, unique reachable peers
    double super_peers = 0;       // S
    double semi_super_peers = 0;  // SS
    double avg_outgoing = 0;      // of unreachable peers
    double reachable_outgoing = 10;
};

struct UnreachableBreakdown {
    double total = 0;
    double reachable = 0;
    double super_peers = 0;
    double semi_super_peers = 0;
    double residual = 0;
    double avg_outgoing = 0;
    double unreachable = 0;
};

/**
 * Splits the counted connection slots of reachable peers. Every
 * reachable-to-reachable connection fills a counted slot at both ends, so
 * reachable peers account for 2 * outgoing * R. Super peers hold a slot at
 * every reachable peer, semi-super peers at half of them. The residual is
 * attributed to unreachable peers at avg_outgoing slots each.
 * Throws Error if the residual is negative.
 */
UnreachableBreakdown estimate_unreachable(double total_slots, const UnreachableInputs& in);

/// Sum of estimates not above `cutoff` per day, averaged over days.
double counted_slots(std::span<const DegreeEstimate> estimates, double cutoff = 130);

struct SuperPeerCounts {
    double super_peers = 0;
    double semi_super_peers = 0;
};

/**
 * Samples every `interval_ms` (from t = 0 to the last logged event) which
 * remotes each sentinel is connected to. S is the mean size of the
 * intersection over all sentinels; SS is the mean intersection of the first
 * two sentinels minus S. Remotes in `known_reachable` are ignored: their
 * slots are already counted as reachable-to-reachable connections, and in a
 * small network many of them meet every sentinel by chance.
 * Throws ConfigError for fewer than two logs.
 */
SuperPeerCounts count_super_peers(std::span<const EventLog> sentinel_logs, std::int64_t interval_ms = 3'600'000,
                                  const std::set<NetAddress>& known_reachable = {});

// unreachable.csv: total,reachable,super,semi_super,residual,avg_outgoing,unreachable
void write_unreachable_csv(std::ostream& out, const UnreachableBreakdown& b);

}  // namespace addrnet
