// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <addrnet/error.hpp>
#include <addrnet/network.hpp>

#include <algorithm>

namespace addrnet {

std::string_view to_string(PeerRole role)
{
    switch (role) {
    case PeerRole::Reachable: return "reachable";
    case PeerRole::Unreachable: return "unreachable";
    case PeerRole::Monitor: return "monitor";
    case PeerRole::Spammer: return "spammer";
    case PeerRole::Tester: return "tester";
    case PeerRole::SuperPeer: return "super";
    case PeerRole::SemiSuperPeer: return "semi-super";
    }
    return "unknown";
}

std::string_view to_string(CloseReason reason)
{
    switch (reason) {
    case CloseReason::Closed: return "closed";
    case CloseReason::Evicted: return "evicted";
    case CloseReason::Refused: return "refused";
    }
    return "closed";
}

bool RelayBook::knows(const AddrRecord& r) const
{
    auto it = known_.find(r.timestamp.seconds);
    return it != known_.end() && it->second.contains(r.address);
}

std::size_t RelayBook::known_count() const
{
    std::size_t n = 0;
    for (const auto& [ts, set] : known_) n += set.size();
    return n;
}

void RelayBook::prune_older_than(Timestamp cutoff)
{
    known_.erase(known_.begin(), known_.lower_bound(cutoff.seconds));
}

Network::Network(NetworkParams params) : params_(params)
{
    if (params_.protected_inbound < 0) throw ConfigError("protected_inbound must be non-negative");
}

PeerId Network::add_peer(PeerSpec spec)
{
    if (spec.outgoing_target < 0 || spec.max_connections < spec.outgoing_target) {
        throw ConfigError("peer needs max_connections >= outgoing >= 0");
    }
    if (spec.reachable && spec.addresses.empty()) throw ConfigError("reachable peer without an address");
    for (const auto& a : spec.addresses) {
        if (owner_.contains(a)) throw ConfigError("address " + a.to_string() + " owned by two peers");
    }
    const auto id = static_cast<PeerId>(peers_.size());
    for (const auto& a : spec.addresses) owner_.emplace(a, id);
    PeerState state;
    state.id = id;
    state.spec = std::move(spec);
    peers_.push_back(std::move(state));
    return id;
}

const PeerState& Network::peer(PeerId id) const
{
    if (id >= peers_.size()) throw EngineError("unknown peer " + std::to_string(id));
    return peers_[id];
}

PeerState& Network::peer(PeerId id)
{
    if (id >= peers_.size()) throw EngineError("unknown peer " + std::to_string(id));
    return peers_[id];
}

std::optional<PeerId> Network::owner_of(const NetAddress& addr) const
{
    auto it = owner_.find(addr);
    if (it == owner_.end()) return std::nullopt;
    return it->second;
}

void Network::advance(SimTime now)
{
    if (now < clock_) throw EngineError("operation time moves backwards");
    clock_ = now;
}

OpenResult Network::open_connection(PeerId from, PeerId to, SimTime now)
{
    const auto& target = peer(to);
    if (target.spec.addresses.empty()) throw EngineError("peer " + std::to_string(to) + " has no address");
    return open_connection(from, target.spec.addresses.front(), now);
}

OpenResult Network::open_connection(PeerId from, const NetAddress& to_addr, SimTime now)
{
    auto& initiator = peer(from);
    auto owner = owner_of(to_addr);
    if (!owner) throw EngineError("no peer owns " + to_addr.to_string());
    const PeerId to = *owner;
    if (to == from) throw EngineError("peer " + std::to_string(from) + " dialing itself");
    auto& acceptor = peer(to);
    if (!acceptor.spec.reachable) throw EngineError("peer " + std::to_string(to) + " is not reachable");
    if (!initiator.spec.parallel_connections && dialed_.contains({from, to_addr})) {
        throw EngineError("duplicate connection " + std::to_string(from) + " -> " + to_addr.to_string());
    }
    if (static_cast<int>(initiator.degree()) >= initiator.spec.max_connections) {
        throw EngineError("peer " + std::to_string(from) + " has no free connection slot");
    }
    advance(now);

    Connection c;
    c.id = next_conn_++;
    c.initiator = from;
    c.acceptor = to;
    c.dialed = to_addr;
    c.established = now;
    c.seq = next_seq_++;
    c.initiator_as = initiator.spec.as;
    conns_.emplace(c.id, c);
    if (!initiator.spec.parallel_connections) dialed_.insert({from, to_addr});

    initiator.connections.push_back(c.id);
    initiator.remotes.push_back(to);
    ++initiator.outbound;
    acceptor.connections.push_back(c.id);
    acceptor.remotes.push_back(from);
    acceptor.inbound_by_age.push_back(c.id);  // times are non-decreasing, so this stays sorted
    refresh_protection(acceptor);

    if (listener_) listener_->on_open(conns_.at(c.id), now);

    OpenResult result;
    result.conn = c.id;
    if (static_cast<int>(acceptor.degree()) > acceptor.spec.max_connections) {
        const ConnId victim = *evict_candidate(to);
        result.evicted = conns_.at(victim);
        result.outcome = victim == c.id ? OpenOutcome::RejectedSelf : OpenOutcome::AcceptedWithEviction;
        remove(victim, now, CloseReason::Evicted);
    }
    if (trace_on_) {
        TraceEntry e;
        e.kind = TraceEntry::Kind::Open;
        e.time = now;
        e.from = from;
        e.to = to_addr;
        e.conn = c.id;
        if (result.evicted) e.evicted = result.evicted->id;
        trace_.push_back(e);
    }
    return result;
}

std::optional<ConnId> Network::evict_candidate(PeerId id) const
{
    const auto& p = peer(id);
    if (p.inbound_by_age.empty()) return std::nullopt;

    const auto k = static_cast<std::size_t>(params_.protected_inbound);
    if (p.inbound_by_age.size() <= k) return p.inbound_by_age.back();

    // Unprotected connections are inbound_by_age[k..], oldest first.
    std::map<Asn, std::size_t> group_size;
    for (std::size_t i = k; i < p.inbound_by_age.size(); ++i) {
        ++group_size[conns_.at(p.inbound_by_age[i]).initiator_as.asn];
    }
    Asn chosen = 0;
    std::size_t best = 0;
    for (const auto& [asn, n] : group_size) {  // ascending ASN, strict > keeps the lowest on ties
        if (n > best) {
            best = n;
            chosen = asn;
        }
    }
    for (std::size_t i = p.inbound_by_age.size(); i-- > k;) {
        const ConnId cid = p.inbound_by_age[i];
        if (conns_.at(cid).initiator_as.asn == chosen) return cid;
    }
    return std::nullopt;  // unreachable: the chosen group is non-empty
}

void Network::refresh_protection(PeerState& p)
{
    const auto k = static_cast<std::size_t>(params_.protected_inbound);
    // Connections only ever move towards the front of the age list, so
    // entries past index k were never protected.
    const auto n = std::min(p.inbound_by_age.size(), k + 1);
    for (std::size_t i = 0; i < n; ++i) conns_.at(p.inbound_by_age[i]).protected_inbound = i < k;
}

void Network::close_connection(ConnId id, SimTime now, CloseReason reason)
{
    if (!conns_.contains(id)) throw EngineError("unknown connection " + std::to_string(id));
    advance(now);
    if (trace_on_) {
        TraceEntry e;
        e.kind = TraceEntry::Kind::Close;
        e.time = now;
        const auto& c = conns_.at(id);
        e.from = c.initiator;
        e.to = c.dialed;
        e.conn = id;
        trace_.push_back(e);
    }
    remove(id, now, reason);
}

void Network::close_connection(PeerId from, PeerId to, SimTime now)
{
    const auto& p = peer(from);
    std::optional<ConnId> found;
    for (std::size_t i = 0; i < p.connections.size(); ++i) {
        if (p.remotes[i] != to) continue;
        if (conns_.at(p.connections[i]).initiator != from) continue;
        if (found) throw EngineError("several connections from " + std::to_string(from) + " to " + std::to_string(to));
        found = p.connections[i];
    }
    if (!found) {
        throw EngineError("no connection from " + std::to_string(from) + " to " + std::to_string(to));
    }
    close_connection(*found, now);
}

void Network::remove(ConnId id, SimTime now, CloseReason reason)
{
    const Connection c = conns_.at(id);
    auto detach = [id](PeerState& p) {
        auto it = std::find(p.connections.begin(), p.connections.end(), id);
        const auto idx = static_cast<std::size_t>(it - p.connections.begin());
        p.connections.erase(it);
        p.remotes.erase(p.remotes.begin() + static_cast<std::ptrdiff_t>(idx));
        p.relay.outbox.erase(id);
    };
    auto& initiator = peers_[c.initiator];
    auto& acceptor = peers_[c.acceptor];
    detach(initiator);
    --initiator.outbound;
    detach(acceptor);
    std::erase(acceptor.inbound_by_age, id);
    if (!initiator.spec.parallel_connections) dialed_.erase({c.initiator, c.dialed});
    conns_.erase(id);
    refresh_protection(acceptor);
    if (listener_) listener_->on_close(c, now, reason);
}

const Connection* Network::connection(ConnId id) const
{
    auto it = conns_.find(id);
    return it == conns_.end() ? nullptr : &it->second;
}

bool Network::connected(PeerId a, PeerId b) const
{
    const auto& pa = peer(a);
    const auto& pb = peer(b);
    const auto& shorter = pa.degree() <= pb.degree() ? pa : pb;
    const PeerId other = &shorter == &pa ? b : a;
    return std::find(shorter.remotes.begin(), shorter.remotes.end(), other) != shorter.remotes.end();
}

std::vector<Connection> Network::snapshot() const
{
    std::vector<Connection> out;
    out.reserve(conns_.size());
    for (const auto& [id, c] : conns_) out.push_back(c);
    std::sort(out.begin(), out.end(), [](const Connection& a, const Connection& b) { return a.id < b.id; });
    return out;
}

Network Network::replay(const std::vector<PeerSpec>& peers, NetworkParams params,
                        const std::vector<TraceEntry>& trace)
{
    Network net(params);
    for (const auto& spec : peers) net.add_peer(spec);
    for (const auto& e : trace) {
        if (e.kind == TraceEntry::Kind::Open) {
            auto r = net.open_connection(e.from, e.to, e.time);
            std::optional<ConnId> evicted;
            if (r.evicted) evicted = r.evicted->id;
            if (r.conn != e.conn || evicted != e.evicted) {
                throw EngineError("replay diverged at connection " + std::to_string(e.conn));
            }
        } else {
            net.close_connection(e.conn, e.time);
        }
    }
    return net;
}

}  // namespace addrnet
