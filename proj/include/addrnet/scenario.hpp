// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <addrnet/as_map.hpp>
#include <addrnet/degree.hpp>
#include <addrnet/matching.hpp>
#include <addrnet/probe.hpp>
#include <addrnet/relay.hpp>
#include <addrnet/routability.hpp>
#include <addrnet/unreachable.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace addrnet {

/// Inclusive integer range; a single number in JSON means min == max.
struct IntRange {
    int min = 0;
    int max = 0;
};

struct FillerAsn {
    Asn asn = 0;
    int count = 0;
};

struct ReachableGroup {
    std::string name;
    int count = 0;
    int max_connections = 125;
    int outgoing = 10;
    /// Degree each peer is brought to at start-up; filler peers make up the difference.
    std::optional<IntRange> degree;
    /// ASNs assigned round-robin; empty gives every peer its own ASN.
    std::vector<Asn> asns;
    AsCategory category = AsCategory::Uncategorized;
    IntRange addresses{1, 1};
    bool ipv6 = true;  // extra addresses are v6 rather than v4
    /// Single-connection inbound peers from these ASNs, opened after everything else.
    std::vector<FillerAsn> filler_asns;
    std::optional<std::int64_t> send_interval_ms;
    bool sentinel = false;
    bool spam_target = true;
    bool probe_target = true;
    std::string client = "core";
};

struct UnreachableGroup {
    std::string name;
    int count = 0;
    std::vector<Asn> asns;
    std::vector<ClientShare> profile;  // outgoing counts and shares; defaults to Core with 10
};

struct SuperPeerSpec {
    int count = 0;
    Asn asn = 0;
};

struct FillerSpec {
    int outgoing = 10;
    Asn asn_base = 4'200'000'000u;
};

struct SpamSpec {
    int spammers = 10;
    double sessions_per_peer_per_day = 0;
    std::int64_t ts_offset_min_s = 400;
    std::int64_t ts_offset_max_s = 540;
    std::int64_t message_interval_ms = 10;
    Asn asn = 4'294'967'294u;
};

struct TesterSpec {
    Asn asn = 0;
};

struct ProbeSpec {
    std::vector<TesterSpec> testers;
    std::int64_t start_s = 600;
    std::int64_t spacing_ms = 10'000;
    ProbeParams params;
};

struct ScenarioConfig {
    std::uint64_t seed = 1;
    std::int64_t duration_ms = 86'400'000;
    std::int64_t latency_ms = 50;
    int protected_inbound = 8;
    std::int64_t redial_delay_s = 30;
    int redial_attempts = 10;
    RelayParams relay;
    std::int64_t send_interval_ms = 30'000;
    RoutabilityPolicy routability = RoutabilityPolicy::bitcoin_core_default();
    AsMap as_map;

    std::vector<ReachableGroup> reachable;
    std::vector<UnreachableGroup> unreachable;
    std::vector<Asn> monitors;
    SuperPeerSpec super_peers;
    SuperPeerSpec semi_super_peers;
    FillerSpec filler;
    SpamSpec spam;
    std::optional<ProbeSpec> probe;

    EstimatorParams estimator;
    MatchParams match;
    std::string output_dir = "out";

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/**
 * Parses a scenario from JSON text. Unknown keys, wrong types and invalid
 * values throw ConfigError with the JSON path of the field. Relative file
 * references (routability_file, as_map_file) resolve against `base_dir`.
 */
ScenarioConfig parse_scenario(const std::string& json_text, const std::string& base_dir = ".");
ScenarioConfig load_scenario(const std::string& path);

}  // namespace addrnet
