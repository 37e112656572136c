// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <addrnet/as_map.hpp>
#include <addrnet/net_address.hpp>

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace addrnet {

using PeerId = std::uint32_t;
using ConnId = std::uint64_t;
using SimTime = std::chrono::milliseconds;

inline constexpr int kUnlimitedConnections = std::numeric_limits<int>::max() / 2;

enum class PeerRole { Reachable, Unreachable, Monitor, Spammer, Tester, SuperPeer, SemiSuperPeer };

std::string_view to_string(PeerRole role);

struct PeerSpec {
    std::vector<NetAddress> addresses;
    bool reachable = false;
    int max_connections = 125;
    int outgoing_target = 10;
    AsInfo as;
    std::string client = "core";
    PeerRole role = PeerRole::Unreachable;
    /// Allows several simultaneous connections to the same address (probe testers).
    bool parallel_connections = false;
};

enum class Direction { Inbound, Outbound };

/// One live connection, stored once and shared by both endpoints.
struct Connection {
    ConnId id = 0;
    PeerId initiator = 0;
    PeerId acceptor = 0;
    NetAddress dialed;  // the acceptor's address the initiator connected to
    SimTime established{0};
    std::uint64_t seq = 0;
    AsInfo initiator_as;
    bool protected_inbound = false;  // among the acceptor's oldest inbound connections

    PeerId remote_of(PeerId local) const { return local == initiator ? acceptor : initiator; }
    Direction direction_for(PeerId local) const
    {
        return local == initiator ? Direction::Outbound : Direction::Inbound;
    }

    friend bool operator==(const Connection&, const Connection&) = default;
};

/// Per-peer addr relay bookkeeping: records already seen and per-connection outboxes.
struct RelayBook {
    std::unordered_map<ConnId, std::vector<AddrRecord>> outbox;

    /// Marks `r` as seen. Returns false if it was seen before.
    bool remember(const AddrRecord& r) { return known_[r.timestamp.seconds].insert(r.address).second; }
    bool knows(const AddrRecord& r) const;
    std::size_t known_count() const;
    void prune_older_than(Timestamp cutoff);

private:
    // Bucketed by timestamp so pruning drops whole buckets.
    std::map<std::int64_t, std::unordered_set<NetAddress>> known_;
};

struct PeerState {
    PeerId id = 0;
    PeerSpec spec;
    std::vector<ConnId> connections;  // opening order
    std::vector<PeerId> remotes;      // parallel to `connections`
    std::vector<ConnId> inbound_by_age;
    std::size_t outbound = 0;
    RelayBook relay;

    std::size_t degree() const { return connections.size(); }
};

enum class OpenOutcome { Accepted, AcceptedWithEviction, RejectedSelf };

struct OpenResult {
    OpenOutcome outcome = OpenOutcome::Accepted;
    ConnId conn = 0;
    std::optional<Connection> evicted;  // set for AcceptedWithEviction and RejectedSelf
};

enum class CloseReason { Closed, Evicted, Refused };

std::string_view to_string(CloseReason reason);

/// Notified after every connection change; used for logging and ground truth.
class NetworkListener {
public:
    virtual ~NetworkListener() = default;
    virtual void on_open(const Connection& conn, SimTime now) = 0;
    virtual void on_close(const Connection& conn, SimTime now, CloseReason reason) = 0;
};

/// One externally requested operation, in the order it was applied.
struct TraceEntry {
    enum class Kind { Open, Close } kind = Kind::Open;
    SimTime time{0};
    PeerId from = 0;
    NetAddress to;
    ConnId conn = 0;
    std::optional<ConnId> evicted;  // Open only: what the engine evicted
};

struct NetworkParams {
    /// Number of oldest inbound connections exempt from eviction.
    int protected_inbound = 8;
};

/**
 * Connection table of every simulated peer plus the inbound eviction rule.
 * Single-threaded; operation times must be non-decreasing.
 */
class Network {
public:
    explicit Network(NetworkParams params = {});

    PeerId add_peer(PeerSpec spec);

    const PeerState& peer(PeerId id) const;
    PeerState& peer(PeerId id);
    std::size_t peer_count() const { return peers_.size(); }
    std::optional<PeerId> owner_of(const NetAddress& addr) const;
    const NetworkParams& params() const { return params_; }

    /// Dials `to` (an address owned by a reachable peer). At capacity, one
    /// inbound connection of the acceptor is evicted, possibly the new one.
    OpenResult open_connection(PeerId from, const NetAddress& to, SimTime now);
    /// Dials the acceptor's first address.
    OpenResult open_connection(PeerId from, PeerId to, SimTime now);

    void close_connection(ConnId id, SimTime now, CloseReason reason = CloseReason::Closed);
    /// Closes the single connection `from` opened to `to`; throws if there is none or several.
    void close_connection(PeerId from, PeerId to, SimTime now);

    /// The inbound connection the eviction rule selects at `peer`: the
    /// youngest unprotected inbound connection of the AS holding the most
    /// unprotected inbound connections (ties: lowest ASN). With no unprotected
    /// inbound connection the youngest inbound connection is chosen, which
    /// right after an arrival is the new connection itself.
    std::optional<ConnId> evict_candidate(PeerId peer) const;

    const Connection* connection(ConnId id) const;
    bool connected(PeerId a, PeerId b) const;
    std::size_t degree(PeerId id) const { return peer(id).degree(); }
    SimTime now() const { return clock_; }

    void set_listener(NetworkListener* listener) { listener_ = listener; }
    void enable_trace(bool on) { trace_on_ = on; }
    const std::vector<TraceEntry>& trace() const { return trace_; }

    /// All live connections ordered by id.
    std::vector<Connection> snapshot() const;

    /// Rebuilds a network from the same peers by re-applying a trace. Throws
    /// EngineError if an eviction decision differs from the recorded one.
    static Network replay(const std::vector<PeerSpec>& peers, NetworkParams params,
                          const std::vector<TraceEntry>& trace);

private:
    void advance(SimTime now);
    void remove(ConnId id, SimTime now, CloseReason reason);
    void refresh_protection(PeerState& p);

    NetworkParams params_;
    std::vector<PeerState> peers_;
    std::unordered_map<NetAddress, PeerId> owner_;
    std::unordered_map<ConnId, Connection> conns_;
    std::set<std::pair<PeerId, NetAddress>> dialed_;
    ConnId next_conn_ = 1;
    std::uint64_t next_seq_ = 1;
    SimTime clock_{0};
    NetworkListener* listener_ = nullptr;
    bool trace_on_ = false;
    std::vector<TraceEntry> trace_;
};

}  // namespace addrnet
