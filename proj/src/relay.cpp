// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <addrnet/error.hpp>
#include <addrnet/relay.hpp>

#include <algorithm>

namespace addrnet {

void RelayParams::validate() const
{
    if (accept_future_window_s <= 0) throw ConfigError("relay.accept_future_window must be positive");
    if (relay_staleness_window_s <= 0) throw ConfigError("relay.relay_staleness_window must be positive");
    if (relay_size_threshold == 0) throw ConfigError("relay.relay_size_threshold must be positive");
    if (fanout == 0) throw ConfigError("relay.fanout must be positive");
}

std::vector<AcceptedRecord> accept_addr(PeerState& state, const AddrMessage& msg, SimTime now,
                                        const RelayParams& params, const RoutabilityPolicy& policy)
{
    const std::int64_t now_s = now.count() / 1000;
    const bool small = msg.records.size() <= params.relay_size_threshold;
    std::vector<AcceptedRecord> out;
    out.reserve(msg.records.size());
    for (const auto& r : msg.records) {
        if (r.timestamp.seconds > now_s + params.accept_future_window_s) continue;
        if (!state.relay.remember(r)) continue;
        const bool fresh = r.timestamp.seconds >= now_s - params.relay_staleness_window_s;
        out.push_back(AcceptedRecord{r, small && fresh && is_routable(r.address, policy)});
    }
    return out;
}

std::vector<ConnId> select_relay_targets(const PeerState& state, ConnId from_conn, Rng& rng, std::size_t fanout)
{
    const auto& conns = state.connections;
    auto sender_pos = std::find(conns.begin(), conns.end(), from_conn);
    const std::size_t skip = sender_pos == conns.end() ? conns.size() : static_cast<std::size_t>(sender_pos - conns.begin());
    const std::size_t pool = conns.size() - (skip < conns.size() ? 1 : 0);
    const std::size_t k = std::min(fanout, pool);

    // Floyd's sampling of k distinct indices from [0, pool)
    std::vector<std::size_t> picked;
    picked.reserve(k);
    for (std::size_t j = pool - k; j < pool; ++j) {
        auto t = static_cast<std::size_t>(rng.below(j + 1));
        if (std::find(picked.begin(), picked.end(), t) != picked.end()) t = j;
        picked.push_back(t);
    }
    std::vector<ConnId> out;
    out.reserve(k);
    for (auto idx : picked) out.push_back(conns[idx >= skip ? idx + 1 : idx]);
    return out;
}

}  // namespace addrnet
