// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <addrnet/event_log.hpp>
#include <addrnet/network.hpp>
#include <addrnet/probe.hpp>
#include <addrnet/scenario.hpp>

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace addrnet {

struct PeerRecord {
    PeerId id = 0;
    PeerRole role = PeerRole::Unreachable;
    std::string group;
    std::vector<NetAddress> addresses;
    bool reachable = false;
    AsInfo as;
    std::string client;
    int max_connections = 0;
    int outgoing = 0;
};

/// Time-weighted mean degree of one reachable peer over one day, repeated per address.
struct TruthRow {
    NetAddress address;
    PeerId peer = 0;
    std::int64_t day = 0;
    double mean_degree = 0;
};

struct SimStats {
    std::size_t spam_sessions = 0;
    std::size_t spam_sessions_rejected = 0;
    std::size_t messages_delivered = 0;
    std::size_t messages_dropped = 0;
    std::size_t evictions = 0;
    std::size_t redials = 0;
    std::size_t probes = 0;
};

struct SimResult {
    std::vector<PeerRecord> peers;
    std::vector<EventLog> monitor_logs;
    std::vector<EventLog> sentinel_logs;
    std::vector<EventLog> tester_logs;
    std::vector<TruthRow> truth_rows;
    std::vector<std::vector<ProbeOutcome>> probe_outcomes;  // per tester, in probe order
    SimStats stats;

    // Filled when SimOptions::trace is set.
    std::vector<PeerSpec> specs;
    NetworkParams network_params;
    std::vector<TraceEntry> trace;
    std::vector<Connection> final_connections;

    DegreeTruth truth() const;
    std::map<NetAddress, AsCategory> address_categories() const;
    std::map<NetAddress, PeerId> address_owners() const;
};

struct SimOptions {
    bool trace = false;
};

/**
 * Builds the network described by `cfg`, runs it for cfg.duration_ms and
 * returns the observer logs plus ground truth. The run is a pure function of
 * the config: every random draw comes from a stream derived from cfg.seed.
 * Throws ConfigError when the requested topology cannot be built.
 */
SimResult run_scenario(const ScenarioConfig& cfg, const SimOptions& options = {});

void write_truth_csv(std::ostream& out, const std::vector<TruthRow>& rows);
void write_peers_csv(std::ostream& out, const std::vector<PeerRecord>& peers);
/// Inverse of write_peers_csv; peers with several addresses are merged back into one record.
std::vector<PeerRecord> read_peers_csv(std::istream& in, const std::string& source = "<peers>");

/// Writes monitor-<k>.log, sentinel-<k>.log, tester-<k>.log, truth.csv, peers.csv
/// and, with testers, probe.csv into `dir` (created if missing).
void write_sim_outputs(const SimResult& result, const std::string& dir);

}  // namespace addrnet
