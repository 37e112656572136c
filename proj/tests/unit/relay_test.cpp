// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <addrnet/error.hpp>
#include <addrnet/event_log.hpp>
#include <addrnet/relay.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

using namespace addrnet;

namespace {

// A hub peer with `n` neighbors; neighbor 0 is the sender.
struct Hub {
    Network net;
    PeerId hub;
    std::vector<ConnId> conns;

    explicit Hub(int n)
    {
        PeerSpec h;
        h.reachable = true;
        h.addresses = {NetAddress::v4(0x14000001)};
        h.max_connections = 200;
        hub = net.add_peer(h);
        for (int i = 0; i < n; ++i) {
            PeerSpec s;
            s.as.asn = static_cast<Asn>(i + 1);
            conns.push_back(net.open_connection(net.add_peer(s), hub, SimTime{0}).conn);
        }
    }

    PeerState& state() { return net.peer(hub); }
};

AddrMessage message(ConnId conn, std::vector<AddrRecord> records)
{
    AddrMessage m;
    m.conn = conn;
    m.records = std::move(records);
    return m;
}

std::vector<AddrRecord> routable_records(std::size_t n, std::int64_t ts, std::uint32_t base = 0x08080000)
{
    std::vector<AddrRecord> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back({NetAddress::v4(base + static_cast<std::uint32_t>(i)), Timestamp{ts}});
    return out;
}

const RoutabilityPolicy& policy()
{
    static const auto p = RoutabilityPolicy::bitcoin_core_default();
    return p;
}

}  // namespace

TEST(AcceptAddr, FutureRecordInSmallMessageIsRelayable)
{
    Hub h(3);
    const SimTime now{1'000'000};
    const auto out = accept_addr(h.state(), message(h.conns[0], routable_records(10, 1000 + 540)), now, {}, policy());
    ASSERT_EQ(out.size(), 10u);
    for (const auto& a : out) EXPECT_TRUE(a.relay_eligible);
}

TEST(AcceptAddr, ElevenRecordsAreKeptButNotRelayed)
{
    Hub h(3);
    const auto out = accept_addr(h.state(), message(h.conns[0], routable_records(11, 0)), SimTime{0}, {}, policy());
    ASSERT_EQ(out.size(), 11u);
    for (const auto& a : out) EXPECT_FALSE(a.relay_eligible);
}

TEST(AcceptAddr, UnroutableAddressIsNotRelayed)
{
    Hub h(3);
    const auto out = accept_addr(h.state(),
                                 message(h.conns[0], {{*NetAddress::parse("127.0.0.1"), Timestamp{0}},
                                                      {*NetAddress::parse("8.8.8.8"), Timestamp{0}}}),
                                 SimTime{0}, {}, policy());
    ASSERT_EQ(out.size(), 2u);
    EXPECT_FALSE(out[0].relay_eligible);
    EXPECT_TRUE(out[1].relay_eligible);
}

TEST(AcceptAddr, WindowsAndDuplicates)
{
    Hub h(3);
    const SimTime now{2'000'000};  // 2,000 s
    auto recs = routable_records(4, 0);
    recs[0].timestamp = Timestamp{2000 + 601};  // too far ahead: dropped
    recs[1].timestamp = Timestamp{2000 + 600};  // at the edge: kept
    recs[2].timestamp = Timestamp{2000 - 601};  // stale: kept, not relayed
    recs[3].timestamp = Timestamp{2000 - 600};  // at the edge: relayed
    const auto out = accept_addr(h.state(), message(h.conns[0], recs), now, {}, policy());
    ASSERT_EQ(out.size(), 3u);
    EXPECT_EQ(out[0].record, recs[1]);
    EXPECT_TRUE(out[0].relay_eligible);
    EXPECT_FALSE(out[1].relay_eligible);
    EXPECT_TRUE(out[2].relay_eligible);

    // Second receipt of the same records: all duplicates.
    EXPECT_TRUE(accept_addr(h.state(), message(h.conns[1], recs), now, {}, policy()).empty());
    EXPECT_TRUE(h.state().relay.knows(recs[1]));
    EXPECT_FALSE(h.state().relay.knows(recs[0]));
}

TEST(RelayBook, PruneDropsOnlyOlderTimestamps)
{
    RelayBook book;
    const AddrRecord old{NetAddress::v4(1), Timestamp{10}};
    const AddrRecord fresh{NetAddress::v4(1), Timestamp{20}};
    EXPECT_TRUE(book.remember(old));
    EXPECT_TRUE(book.remember(fresh));
    EXPECT_FALSE(book.remember(old));
    EXPECT_EQ(book.known_count(), 2u);
    book.prune_older_than(Timestamp{20});
    EXPECT_FALSE(book.knows(old));
    EXPECT_TRUE(book.knows(fresh));
}

TEST(SelectRelayTargets, FanoutAndSenderExclusion)
{
    Rng rng(3);
    Hub big(125);
    for (int i = 0; i < 200; ++i) {
        const auto t = select_relay_targets(big.state(), big.conns[0], rng, 2);
        ASSERT_EQ(t.size(), 2u);
        EXPECT_NE(t[0], t[1]);
        EXPECT_NE(t[0], big.conns[0]);
        EXPECT_NE(t[1], big.conns[0]);
    }
    Hub two(2);
    const auto t = select_relay_targets(two.state(), two.conns[0], rng, 2);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t[0], two.conns[1]);
    Hub one(1);
    EXPECT_TRUE(select_relay_targets(one.state(), one.conns[0], rng, 2).empty());
}

TEST(SelectRelayTargets, UniformOverNeighbors)
{
    // Chi-square goodness of fit over 20,000 relays at a hub of degree 10.
    Hub h(10);
    Rng rng(99);
    std::map<ConnId, double> hits;
    const int draws = 20'000;
    for (int i = 0; i < draws; ++i) {
        for (ConnId c : select_relay_targets(h.state(), h.conns[0], rng, 2)) hits[c] += 1;
    }
    EXPECT_EQ(hits.count(h.conns[0]), 0u);
    const double expected = draws * 2.0 / 9.0;
    double chi2 = 0;
    for (std::size_t i = 1; i < h.conns.size(); ++i) {
        const double d = hits[h.conns[i]] - expected;
        chi2 += d * d / expected;
    }
    // Wilson-Hilferty critical value for 8 degrees of freedom at p = 0.001.
    const double df = 8, z = 3.0902;
    const double crit = df * std::pow(1 - 2 / (9 * df) + z * std::sqrt(2 / (9 * df)), 3);
    EXPECT_LT(chi2, crit);
}

TEST(EventLog, RoundTripsThroughText)
{
    EventLog log;
    LogEvent open;
    open.time_ms = 5;
    open.seq = 1;
    open.kind = EventKind::ConnOpen;
    open.remote = *NetAddress::parse("[2001:db8::2]:8333");
    open.conn = 7;
    log.append(open);
    LogEvent addr = open;
    addr.seq = 2;
    addr.kind = EventKind::AddrMsg;
    addr.records = routable_records(3, 400);
    log.append(addr);
    LogEvent close = open;
    close.time_ms = 9;
    close.seq = 3;
    close.kind = EventKind::ConnClose;
    close.reason = CloseReason::Evicted;
    close.direction = Direction::Inbound;
    log.append(close);

    std::stringstream text;
    log.write(text);
    EXPECT_EQ(EventLog::read(text), log);
    EXPECT_THROW(log.append(open), EngineError);  // out of order
}

TEST(EventLog, MalformedLineReportsLineNumber)
{
    std::istringstream in(std::string(EventLog::kHeader) +
                          "\n0,1,CONN_OPEN,0,1.2.3.4:8333,out,1,,\n"
                          "5,2,ADDR,0,1.2.3.4:8333,out,1,,1.1.1.1:8333@x\n");
    try {
        EventLog::read(in, "m.log");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_NE(std::string(e.what()).find("m.log:3"), std::string::npos);
    }
    std::istringstream wrong_header("time,seq\n");
    EXPECT_THROW(EventLog::read(wrong_header), ParseError);
    std::istringstream unknown_kind(std::string(EventLog::kHeader) + "\n0,1,PING,0,1.2.3.4:8333,out,1,,\n");
    EXPECT_THROW(EventLog::read(unknown_kind), ParseError);
}
