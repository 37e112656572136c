// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <addrnet/degree.hpp>
#include <addrnet/error.hpp>
#include <addrnet/matching.hpp>
#include <addrnet/report.hpp>
#include <addrnet/rng.hpp>
#include <addrnet/unreachable.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace addrnet;

namespace {

NetAddress A(std::string_view s) { return *NetAddress::parse(s); }

// Builds monitor logs event by event with increasing sequence numbers.
struct LogBuilder {
    EventLog log;
    std::uint64_t seq = 0;

    void addr(std::int64_t time_ms, const NetAddress& from, std::vector<AddrRecord> records)
    {
        LogEvent e;
        e.time_ms = time_ms;
        e.seq = ++seq;
        e.kind = EventKind::AddrMsg;
        e.remote = from;
        e.records = std::move(records);
        log.append(std::move(e));
    }

    void conn(std::int64_t time_ms, const NetAddress& remote, EventKind kind, ConnId id,
              Direction dir = Direction::Inbound)
    {
        LogEvent e;
        e.time_ms = time_ms;
        e.seq = ++seq;
        e.kind = kind;
        e.remote = remote;
        e.conn = id;
        e.direction = dir;
        log.append(std::move(e));
    }

    // `count` records stamped `ts`, sent in messages of `per_message`.
    void batch(std::int64_t time_ms, const NetAddress& from, std::int64_t ts, std::size_t count,
               std::size_t per_message = 10, std::uint32_t base = 0x08000000)
    {
        for (std::size_t i = 0; i < count; i += per_message) {
            std::vector<AddrRecord> recs;
            for (std::size_t j = i; j < std::min(count, i + per_message); ++j) {
                recs.push_back({NetAddress::v4(base + static_cast<std::uint32_t>(j)), Timestamp{ts}});
            }
            addr(time_ms, from, std::move(recs));
        }
    }
};

std::vector<AddrRecord> tuples(std::uint32_t base, std::size_t n, std::int64_t ts)
{
    std::vector<AddrRecord> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back({NetAddress::v4(base + static_cast<std::uint32_t>(i)), Timestamp{ts}});
    return out;
}

}  // namespace

// ---------------------------------------------------------------- degree

TEST(FilterDirectBatches, CountsQualifyingRecords)
{
    LogBuilder b;
    const auto p = A("20.0.0.1");
    b.batch(1'000'000, p, 1000 + 450, 80);  // received at 1,000 s, 450 s ahead
    const auto groups = filter_direct_batches(b.log, {});
    ASSERT_EQ(groups.size(), 1u);
    EXPECT_EQ(groups.begin()->second.count, 80u);
    EXPECT_EQ(groups.begin()->first.sender, p);
    EXPECT_EQ(groups.begin()->second.first_receive_ms, 1'000'000);
}

TEST(FilterDirectBatches, DropsSmallGroupsAndSmallMessages)
{
    LogBuilder b;
    b.batch(0, A("20.0.0.1"), 400, 10);      // c = 10: dropped
    b.batch(0, A("20.0.0.2"), 400, 11, 11);  // c = 11: kept
    b.batch(0, A("20.0.0.3"), 400, 60, 3);   // 3-record messages: ignored
    b.batch(0, A("20.0.0.4"), 179, 60);      // too close to the receive time
    b.batch(0, A("20.0.0.5"), 601, 60);      // too far ahead
    b.batch(0, A("20.0.0.6"), 180, 32, 4);   // both window edges and 4-record messages qualify
    b.batch(0, A("20.0.0.6"), 600, 28, 4, 0x09000000);
    b.batch(0, A("20.0.0.8"), 400, 42);      // trailing 2-record message ignored: c = 40
    const auto groups = filter_direct_batches(b.log, {});
    std::map<NetAddress, std::size_t> by_sender;
    for (const auto& [k, v] : groups) by_sender[k.sender] += v.count;
    EXPECT_EQ(by_sender.size(), 3u);
    EXPECT_EQ(by_sender[A("20.0.0.2")], 11u);
    EXPECT_EQ(by_sender[A("20.0.0.6")], 60u);
    EXPECT_EQ(by_sender[A("20.0.0.8")], 40u);
}

TEST(IntermediateEstimate, Examples)
{
    const EstimatorParams p;
    EXPECT_NEAR(intermediate_estimate(79.6, p), 125.0, 0.05);
    EXPECT_DOUBLE_EQ(intermediate_estimate(9870, p), 2.0);
    EXPECT_THROW(intermediate_estimate(0, p), std::domain_error);
    EXPECT_THROW(intermediate_estimate(-3, p), std::domain_error);
    EXPECT_THROW(checked_intermediate_estimate(10, p), std::domain_error);
    EXPECT_DOUBLE_EQ(checked_intermediate_estimate(11, p), 1 + 9870.0 / 11);
}

TEST(IntermediateEstimate, RoundTripProperty)
{
    const EstimatorParams p;
    for (int n = 3; n <= 988; ++n) {
        const double c = 4935.0 * 2 / (n - 1);
        EXPECT_NEAR(intermediate_estimate(c, p), n, 1e-9 * n) << n;
    }
}

TEST(IntermediateEstimate, StrictlyDecreasing)
{
    const EstimatorParams p;
    Rng rng(17);
    for (int i = 0; i < 10'000; ++i) {
        const double a = 0.01 + rng.unit() * 10'000;
        const double b = a + 1e-6 + rng.unit() * 100;
        EXPECT_GT(intermediate_estimate(a, p), intermediate_estimate(b, p));
    }
}

TEST(Median, Examples)
{
    EXPECT_EQ(median({125, 124, 300}), 125);
    EXPECT_EQ(median({120, 130}), 125);
    EXPECT_FALSE(median({}));
    const auto d = daily_estimate(A("1.1.1.1"), 3, {125, 124, 300});
    ASSERT_TRUE(d);
    EXPECT_EQ(d->estimate, 125);
    EXPECT_EQ(d->samples, 3u);
    EXPECT_EQ(d->day, 3);
    EXPECT_FALSE(daily_estimate(A("1.1.1.1"), 0, {}));
}

TEST(Median, RobustToMinorityContamination)
{
    Rng rng(23);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto n = static_cast<std::size_t>(rng.between(1, 40));
        std::vector<double> values(n);
        for (auto& v : values) v = 20 + rng.unit() * 100;
        const std::size_t k = (n - 1) / 2;  // strictly fewer than half
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        rng.shuffle(idx);
        std::vector<double> clean_kept;
        std::vector<double> dirty = values;
        for (std::size_t i = 0; i < n; ++i) {
            if (i < k) {
                dirty[idx[i]] = rng.below(2) ? 1e9 * rng.unit() : -1e9 * rng.unit();
            } else {
                clean_kept.push_back(values[idx[i]]);
            }
        }
        const double m = *median(dirty);
        EXPECT_GE(m, *std::min_element(clean_kept.begin(), clean_kept.end()));
        EXPECT_LE(m, *std::max_element(clean_kept.begin(), clean_kept.end()));
    }
}

TEST(EstimateDegrees, PoolsBatchesPerSubjectAndDay)
{
    LogBuilder b;
    const auto p = A("20.0.0.1");
    const std::int64_t day_ms = 86'400'000;
    // Three sessions on day 0 with counts 80, 79 and 100; one on day 1 with 84.
    b.batch(1000, p, 500, 80, 10, 0x08000000);
    b.batch(2000, p, 510, 79, 10, 0x09000000);
    b.batch(3000, p, 520, 100, 10, 0x0A000000);
    b.batch(day_ms + 1000, p, 86'400 + 500, 84);
    const std::vector<EventLog> logs{b.log};
    const auto est = estimate_degrees(logs, {});
    ASSERT_EQ(est.size(), 2u);
    EXPECT_DOUBLE_EQ(est[0].estimate, 1 + 9870.0 / 80);
    EXPECT_EQ(est[0].samples, 3u);
    EXPECT_EQ(est[1].day, 1);
    EXPECT_DOUBLE_EQ(est[1].estimate, 1 + 9870.0 / 84);

    std::stringstream csv;
    write_estimates_csv(csv, est);
    EXPECT_EQ(read_estimates_csv(csv), est);
}

TEST(ValidateEstimates, Examples)
{
    const auto a = A("20.0.0.1");
    const std::vector<DegreeEstimate> est{{a, 0, 120, 10}};
    DegreeTruth truth{{{a, 0}, 125.0}};
    EXPECT_NEAR(validate_estimates(est, truth), 0.04, 1e-12);
    const std::vector<DegreeEstimate> same{{a, 0, 125, 10}};
    EXPECT_EQ(validate_estimates(same, truth), 0.0);
    const std::vector<DegreeEstimate> other{{A("20.0.0.9"), 0, 50, 10}};
    try {
        validate_estimates(other, truth);
        FAIL() << "expected Error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("20.0.0.9"), std::string::npos);
    }
}

TEST(TruthCsv, ParsesAndRejectsBadRows)
{
    std::istringstream in("address,peer,day,mean_degree\n20.0.0.1:8333,0,0,40.5\n");
    const auto truth = read_truth_csv(in);
    EXPECT_DOUBLE_EQ(truth.at({A("20.0.0.1"), 0}), 40.5);
    std::istringstream bad("address,peer,day,mean_degree\n20.0.0.1:8333,0,0,abc\n");
    EXPECT_THROW(read_truth_csv(bad), ParseError);
}

// ---------------------------------------------------------------- matching

TEST(MatchAddresses, LinksAddressesSharingTuples)
{
    LogBuilder b;
    const auto v4 = A("20.0.0.1"), v6 = A("[2a01:4f8::1]:8333"), second_hop = A("20.0.0.7");
    // One peer relays the same 30 tuples over both of its addresses.
    const auto batch = tuples(0x08000000, 30, 1000);
    for (std::size_t i = 0; i < batch.size(); i += 10) {
        std::vector<AddrRecord> part(batch.begin() + static_cast<std::ptrdiff_t>(i),
                                     batch.begin() + static_cast<std::ptrdiff_t>(i + 10));
        b.addr(100'000, v4, part);
        b.addr(100'000, v6, part);
    }
    // A second-hop peer relays 3 of them plus 12 of its own with the same timestamp.
    auto hop = tuples(0x08000000, 3, 1000);
    auto own = tuples(0x09000000, 12, 1000);
    hop.insert(hop.end(), own.begin(), own.end());
    b.addr(100'000, second_hop, hop);

    const std::vector<EventLog> logs{b.log};
    const auto clusters = match_addresses(logs, {});
    ASSERT_EQ(clusters.size(), 1u);
    EXPECT_EQ(clusters[0].addresses, (std::vector<NetAddress>{v4, v6}));
    ASSERT_EQ(clusters[0].evidence.size(), 1u);
    EXPECT_EQ(clusters[0].evidence[0].shared, 30u);
}

TEST(MatchAddresses, MergesTransitively)
{
    LogBuilder b;
    const auto a = A("20.0.0.1"), bb = A("20.0.0.2"), c = A("20.0.0.3");
    const auto ab = tuples(0x08000000, 10, 1000);
    const auto bc = tuples(0x09000000, 10, 2000);
    b.addr(100'000, a, ab);
    b.addr(100'000, bb, ab);
    b.addr(1'000'000, bb, bc);
    b.addr(1'000'000, c, bc);
    const std::vector<EventLog> logs{b.log};
    const auto clusters = match_addresses(logs, {});
    ASSERT_EQ(clusters.size(), 1u);
    EXPECT_EQ(clusters[0].addresses.size(), 3u);
}

TEST(MatchAddresses, RequiresFutureTimestampsAndEnoughTuples)
{
    LogBuilder b;
    const auto a = A("20.0.0.1"), c = A("20.0.0.2"), d = A("20.0.0.3"), e = A("20.0.0.4");
    // Only 299 s ahead: not a spam tuple.
    b.addr(100'000, a, tuples(0x08000000, 20, 399));
    b.addr(100'000, c, tuples(0x08000000, 20, 399));
    // Only 9 tuples per source with that timestamp.
    b.addr(100'000, d, tuples(0x09000000, 9, 1000));
    b.addr(100'000, e, tuples(0x09000000, 9, 1000));
    const std::vector<EventLog> logs{b.log};
    EXPECT_TRUE(match_addresses(logs, {}).empty());
}

TEST(CountUniquePeers, Arithmetic)
{
    std::set<NetAddress> observed;
    for (std::uint32_t i = 0; i < 10; ++i) observed.insert(NetAddress::v4(0x14000000 + i));
    EXPECT_EQ(count_unique_peers(observed, {}), 10u);
    PeerCluster c;
    for (std::uint32_t i = 0; i < 4; ++i) c.addresses.push_back(NetAddress::v4(0x14000000 + i));
    c.addresses.push_back(NetAddress::v4(0x15000000));  // not observed
    const std::vector<PeerCluster> clusters{c};
    EXPECT_EQ(count_unique_peers(observed, clusters), 7u);
}

TEST(CountUniquePeers, AddressToPeerRatio)
{
    // 8,800 observed addresses, 1,150 two-address peers -> 7,650 peers.
    std::set<NetAddress> observed;
    std::vector<PeerCluster> clusters;
    for (std::uint32_t i = 0; i < 8800; ++i) observed.insert(NetAddress::v4(0x14000000 + i));
    for (std::uint32_t i = 0; i < 1150; ++i) {
        clusters.push_back({{NetAddress::v4(0x14000000 + 2 * i), NetAddress::v4(0x14000000 + 2 * i + 1)}, {}});
    }
    const auto peers = count_unique_peers(observed, clusters);
    EXPECT_EQ(peers, 7650u);
    EXPECT_NEAR(8800.0 / static_cast<double>(peers) - 1, 0.15, 0.005);  // counting addresses overstates by 15 % of peers
    EXPECT_NEAR(1 - static_cast<double>(peers) / 8800.0, 0.13, 0.005);  // and by 13 % of addresses
}

TEST(ClusterConsistency, Examples)
{
    const auto a = A("20.0.0.1"), b = A("20.0.0.2");
    const std::vector<PeerCluster> clusters{{{a, b}, {}}};
    const std::vector<DegreeEstimate> same{{a, 0, 80, 5}, {b, 0, 80, 5}};
    EXPECT_EQ(cluster_estimate_consistency(clusters, same), 0.0);
    const std::vector<DegreeEstimate> near{{a, 0, 100, 5}, {b, 0, 102, 5}};
    EXPECT_NEAR(*cluster_estimate_consistency(clusters, near), 1.0 / 101, 1e-12);
    // Per-address means over days: a averages 100, b averages 102.
    const std::vector<DegreeEstimate> days{{a, 0, 98, 5}, {a, 1, 102, 5}, {b, 0, 102, 5}};
    EXPECT_NEAR(*cluster_estimate_consistency(clusters, days), 1.0 / 101, 1e-12);
    const std::vector<DegreeEstimate> lonely{{a, 0, 100, 5}};
    EXPECT_FALSE(cluster_estimate_consistency(clusters, lonely));
}

// ---------------------------------------------------------------- unreachable

TEST(AvgOutgoing, FootnoteProfile)
{
    const double hand = (10 * 0.784 + 12 * 0.065 + 3 * 0.033 + 8 * 0.028) / (0.784 + 0.065 + 0.033 + 0.028);
    EXPECT_NEAR(avg_outgoing(default_client_profile()), hand, 1e-12);
    EXPECT_NEAR(hand, 9.83, 0.005);
    const std::vector<ClientShare> single{{"core", 10, 1.0}};
    EXPECT_DOUBLE_EQ(avg_outgoing(single), 10);
    const std::vector<ClientShare> sym{{"a", 8, 0.5}, {"b", 12, 0.5}};
    EXPECT_DOUBLE_EQ(avg_outgoing(sym), 10);
    EXPECT_THROW(avg_outgoing({}), ConfigError);
    const std::vector<ClientShare> zero{{"a", 8, 0}};
    EXPECT_THROW(avg_outgoing(zero), ConfigError);
}

TEST(EstimateUnreachable, ReferenceConstants)
{
    UnreachableInputs in;
    in.reachable = 7650;
    in.super_peers = 18;
    in.semi_super_peers = 26;
    in.avg_outgoing = avg_outgoing(default_client_profile());
    const auto b = estimate_unreachable(712'840, in);
    EXPECT_EQ(b.reachable, 153'000);
    EXPECT_EQ(b.super_peers, 137'700);
    EXPECT_EQ(b.semi_super_peers, 99'450);
    EXPECT_EQ(b.residual, 322'690);
    EXPECT_NEAR(b.unreachable, 322'690 / in.avg_outgoing, 1e-9);
    EXPECT_NEAR(b.unreachable, 32'838, 0.01 * 32'838);
}

TEST(EstimateUnreachable, EmptyNetworkAndNegativeResidual)
{
    UnreachableInputs in;
    in.avg_outgoing = 10;
    const auto b = estimate_unreachable(0, in);
    EXPECT_EQ(b.unreachable, 0);
    in.reachable = 10;
    EXPECT_THROW(estimate_unreachable(100, in), Error);
}

TEST(EstimateUnreachable, BreakdownIdentityProperty)
{
    Rng rng(8);
    for (int i = 0; i < 5000; ++i) {
        UnreachableInputs in;
        in.reachable = static_cast<double>(rng.between(0, 10'000));
        in.super_peers = static_cast<double>(rng.between(0, 50));
        in.semi_super_peers = static_cast<double>(rng.between(0, 50));
        in.avg_outgoing = 1 + rng.unit() * 11;
        const double used = 20 * in.reachable + in.super_peers * in.reachable + in.semi_super_peers * in.reachable / 2;
        const double total = used + static_cast<double>(rng.between(0, 1'000'000));
        const auto b = estimate_unreachable(total, in);
        EXPECT_EQ(b.reachable + b.super_peers + b.semi_super_peers + b.residual, total);
        EXPECT_GE(b.residual, 0);
        EXPECT_DOUBLE_EQ(b.unreachable, b.residual / b.avg_outgoing);
    }
}

TEST(CountedSlots, SumsBelowCutoffPerDayAndAverages)
{
    const std::vector<DegreeEstimate> est{{A("20.0.0.1"), 0, 100, 3}, {A("20.0.0.2"), 0, 131, 3},
                                          {A("20.0.0.3"), 0, 130, 3}, {A("20.0.0.1"), 1, 90, 3}};
    EXPECT_DOUBLE_EQ(counted_slots(est, 130), (230.0 + 90.0) / 2);
}

TEST(CountSuperPeers, HourlyIntersections)
{
    // 18 remotes at all three sentinels, 26 more at sentinels 0 and 1, plus
    // unrelated remotes.
    std::vector<EventLog> logs(3);
    std::vector<LogBuilder> b(3);
    ConnId id = 1;
    for (std::uint32_t i = 0; i < 18; ++i) {
        for (auto& lb : b) lb.conn(0, NetAddress::v4(0x46000000 + i), EventKind::ConnOpen, id++);
    }
    for (std::uint32_t i = 0; i < 26; ++i) {
        b[0].conn(0, NetAddress::v4(0x47000000 + i), EventKind::ConnOpen, id++);
        b[1].conn(0, NetAddress::v4(0x47000000 + i), EventKind::ConnOpen, id++);
    }
    for (std::uint32_t i = 0; i < 30; ++i) b[2].conn(0, NetAddress::v4(0x48000000 + i), EventKind::ConnOpen, id++);
    for (int i = 0; i < 3; ++i) {
        b[static_cast<std::size_t>(i)].conn(7'200'000, NetAddress::v4(0x49000000), EventKind::ConnOpen, id++);
        logs[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)].log;
    }
    const auto s = count_super_peers(logs);
    // Samples at 0 h, 1 h, 2 h; the late common remote is live only at 2 h.
    EXPECT_NEAR(s.super_peers, 18 + 1.0 / 3, 1e-12);
    EXPECT_NEAR(s.semi_super_peers, 26, 1e-12);

    const std::set<NetAddress> known{NetAddress::v4(0x49000000)};
    const auto excl = count_super_peers(logs, 3'600'000, known);
    EXPECT_DOUBLE_EQ(excl.super_peers, 18);
    EXPECT_DOUBLE_EQ(excl.semi_super_peers, 26);
}

TEST(CountSuperPeers, ClosedConnectionsAndErrors)
{
    std::vector<LogBuilder> b(2);
    b[0].conn(0, A("70.0.0.1"), EventKind::ConnOpen, 1);
    b[1].conn(0, A("70.0.0.1"), EventKind::ConnOpen, 2);
    b[0].conn(1000, A("70.0.0.1"), EventKind::ConnClose, 1);
    b[1].conn(3'600'000, A("70.0.0.2"), EventKind::ConnOpen, 3);
    const std::vector<EventLog> logs{b[0].log, b[1].log};
    const auto s = count_super_peers(logs);
    EXPECT_DOUBLE_EQ(s.super_peers, 0.5);  // common at 0 h, gone at 1 h

    std::vector<LogBuilder> none(2);
    none[0].conn(0, A("70.0.0.1"), EventKind::ConnOpen, 1);
    none[1].conn(0, A("70.0.0.2"), EventKind::ConnOpen, 2);
    const std::vector<EventLog> disjoint{none[0].log, none[1].log};
    const auto z = count_super_peers(disjoint);
    EXPECT_EQ(z.super_peers, 0);
    EXPECT_EQ(z.semi_super_peers, 0);

    const std::vector<EventLog> one{b[0].log};
    EXPECT_THROW(count_super_peers(one), ConfigError);
}

// ---------------------------------------------------------------- report

TEST(Histogram, AllAt125)
{
    std::vector<DegreeEstimate> est;
    for (std::uint32_t i = 0; i < 10; ++i) est.push_back({NetAddress::v4(0x14000000 + i), 0, 125, 5});
    const auto rows = degree_histogram(est);
    double sum = 0;
    for (const auto& r : rows) {
        if (r.category != "all") continue;
        sum += r.frequency;
        if (r.bin_low == 125) EXPECT_DOUBLE_EQ(r.frequency, 1.0);
        else EXPECT_EQ(r.frequency, 0.0);
    }
    EXPECT_DOUBLE_EQ(sum, 1.0);
}

TEST(Histogram, CategoryRowsStackToAll)
{
    std::map<NetAddress, AsCategory> cats;
    std::vector<DegreeEstimate> est;
    Rng rng(4);
    for (std::uint32_t i = 0; i < 200; ++i) {
        const auto a = NetAddress::v4(0x14000000 + i);
        est.push_back({a, 0, 2 + rng.unit() * 200, 3});
        if (i % 3 == 0) cats[a] = AsCategory::CloudProvider;
        if (i % 3 == 1) cats[a] = AsCategory::Isp;
    }
    const auto rows = degree_histogram(est, 5, &cats);
    std::map<double, double> all, parts;
    for (const auto& r : rows) {
        (r.category == "all" ? all : parts)[r.bin_low] += r.frequency;
        EXPECT_EQ(std::fmod(r.bin_low, 5.0), 0.0);
    }
    for (const auto& [bin, f] : all) EXPECT_NEAR(parts[bin], f, 1e-12) << bin;
}

TEST(CategoryStats, MediansAndOmittedEmptyCategories)
{
    std::map<NetAddress, AsCategory> cats{{A("20.0.0.1"), AsCategory::CloudProvider},
                                          {A("20.0.0.2"), AsCategory::CloudProvider},
                                          {A("20.0.0.3"), AsCategory::Isp}};
    const std::vector<DegreeEstimate> est{{A("20.0.0.1"), 0, 124, 1}, {A("20.0.0.2"), 0, 126, 1},
                                          {A("20.0.0.3"), 0, 97, 1}};
    const auto stats = category_stats(est, cats);
    ASSERT_EQ(stats.size(), 2u);
    for (const auto& s : stats) {
        if (s.category == AsCategory::CloudProvider) {
            EXPECT_EQ(s.count, 2u);
            EXPECT_EQ(s.median, 125);
        } else {
            EXPECT_EQ(s.category, AsCategory::Isp);
            EXPECT_EQ(s.median, 97);
        }
    }
}
