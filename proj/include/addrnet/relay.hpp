// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <addrnet/network.hpp>
#include <addrnet/rng.hpp>
#include <addrnet/routability.hpp>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace addrnet {

/// Wire maximum of records per addr message.
inline constexpr std::size_t kMaxAddrPerMessage = 1000;

struct RelayParams {
    std::int64_t accept_future_window_s = 600;
    std::int64_t relay_staleness_window_s = 600;
    std::size_t relay_size_threshold = 10;
    std::size_t fanout = 2;

    /// Throws ConfigError unless every field is positive.
    void validate() const;
};

struct AddrMessage {
    PeerId sender = 0;
    ConnId conn = 0;  // connection the message travels on
    std::vector<AddrRecord> records;
    SimTime sent{0};
};

struct AcceptedRecord {
    AddrRecord record;
    bool relay_eligible = false;
};

/**
 * Core's addr acceptance at a receiving peer. Records stamped more than the
 * future window ahead are dropped, as are records the peer has already seen.
 * A kept record may be relayed when the message held at most
 * relay_size_threshold records, the record is not stale and its address is
 * routable. Marks every kept record as known in `state.relay`.
 *
 * Precondition: msg.conn is a live connection of `state`.
 */
std::vector<AcceptedRecord> accept_addr(PeerState& state, const AddrMessage& msg, SimTime now,
                                        const RelayParams& params, const RoutabilityPolicy& policy);

/// min(fanout, n-1) distinct connections of `state` other than `from_conn`, uniformly drawn.
std::vector<ConnId> select_relay_targets(const PeerState& state, ConnId from_conn, Rng& rng, std::size_t fanout);

}  // namespace addrnet
