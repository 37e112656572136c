// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <addrnet/as_map.hpp>
#include <addrnet/csv.hpp>
#include <addrnet/error.hpp>
#include <addrnet/net_address.hpp>
#include <addrnet/rng.hpp>
#include <addrnet/routability.hpp>
#include <addrnet/spam.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

using namespace addrnet;

namespace {

NetAddress addr(std::string_view text)
{
    auto a = NetAddress::parse(text);
    if (!a) throw std::runtime_error("bad test address " + std::string(text));
    return *a;
}

// Prefix lengths of the default v4 blocks, written out independently of the
// library so the excluded share can be computed by hand.
double hand_computed_v4_excluded_share()
{
    const int lengths[] = {8, 8, 10, 8, 16, 12, 24, 16, 15, 24, 24, 32};
    double n = 0;
    for (int l : lengths) n += std::ldexp(1.0, 32 - l);
    return n / std::ldexp(1.0, 32);
}

}  // namespace

TEST(NetAddress, ParsesAndFormatsBothFamilies)
{
    EXPECT_EQ(addr("1.2.3.4").to_string(), "1.2.3.4:8333");
    EXPECT_EQ(addr("1.2.3.4:18333").port(), 18333);
    EXPECT_EQ(addr("2001:db8::1").to_string(), "[2001:db8::1]:8333");
    EXPECT_EQ(addr("[2001:db8::1]:9").port(), 9);
    EXPECT_EQ(addr("10.0.0.1").v4_value(), 0x0A000001u);
    EXPECT_FALSE(NetAddress::parse("1.2.3"));
    EXPECT_FALSE(NetAddress::parse("1.2.3.256"));
    EXPECT_FALSE(NetAddress::parse("[::1"));
    EXPECT_FALSE(NetAddress::parse(""));
}

TEST(NetAddress, RoundTripsThroughText)
{
    Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
        NetAddress a;
        if (rng.below(2) == 0) {
            a = NetAddress::v4(static_cast<std::uint32_t>(rng.next()), static_cast<std::uint16_t>(rng.next()));
        } else {
            std::array<std::uint8_t, 16> b{};
            for (auto& x : b) x = static_cast<std::uint8_t>(rng.next());
            a = NetAddress::v6(b, static_cast<std::uint16_t>(rng.next()));
        }
        auto back = NetAddress::parse(a.to_string());
        ASSERT_TRUE(back) << a.to_string();
        EXPECT_EQ(*back, a);
    }
}

TEST(NetAddress, TotalOrderIsAntisymmetricAndTransitive)
{
    Rng rng(5);
    std::vector<NetAddress> v;
    for (int i = 0; i < 60; ++i) {
        // Small value ranges so equal hosts with different ports occur.
        if (rng.below(2) == 0) {
            v.push_back(NetAddress::v4(static_cast<std::uint32_t>(rng.below(4)), static_cast<std::uint16_t>(rng.below(3))));
        } else {
            std::array<std::uint8_t, 16> b{};
            b[15] = static_cast<std::uint8_t>(rng.below(4));
            v.push_back(NetAddress::v6(b, static_cast<std::uint16_t>(rng.below(3))));
        }
    }
    for (const auto& a : v) {
        for (const auto& b : v) {
            EXPECT_EQ(a < b, b > a);
            EXPECT_FALSE(a < b && b < a);
            EXPECT_EQ(a == b, !(a < b) && !(b < a));
            for (const auto& c : v) {
                if (a < b && b < c) EXPECT_TRUE(a < c);
            }
        }
    }
    // v4 sorts before v6 regardless of value.
    EXPECT_LT(addr("255.255.255.255"), addr("::"));
}

TEST(AddrRecord, TextForm)
{
    const AddrRecord r{addr("8.8.8.8"), Timestamp{42}};
    EXPECT_EQ(to_string(r), "8.8.8.8:8333@42");
    EXPECT_EQ(parse_record("8.8.8.8:8333@42"), r);
    EXPECT_EQ(parse_record("[2001:db8::1]:8333@7")->timestamp.seconds, 7);
    EXPECT_FALSE(parse_record("8.8.8.8"));
    EXPECT_FALSE(parse_record("8.8.8.8@x"));
}

TEST(Routability, DocumentedExamples)
{
    const auto policy = RoutabilityPolicy::bitcoin_core_default();
    EXPECT_FALSE(is_routable(addr("127.0.0.1"), policy));
    EXPECT_TRUE(is_routable(addr("8.8.8.8"), policy));
    EXPECT_FALSE(is_routable(addr("10.1.2.3"), policy));
    EXPECT_FALSE(is_routable(addr("192.168.1.1"), policy));
    EXPECT_FALSE(is_routable(addr("172.31.255.255"), policy));
    EXPECT_TRUE(is_routable(addr("172.32.0.0"), policy));
    EXPECT_FALSE(is_routable(addr("::1"), policy));
    EXPECT_FALSE(is_routable(addr("fe80::1"), policy));
    EXPECT_TRUE(is_routable(addr("2a01:4f8::1"), policy));
}

TEST(Routability, ExcludedShareMatchesHandComputation)
{
    const auto policy = RoutabilityPolicy::bitcoin_core_default();
    const double expected = hand_computed_v4_excluded_share();
    EXPECT_NEAR(policy.excluded_v4_fraction(), expected, 1e-15);
    EXPECT_NEAR(expected, 0.013, 0.001);
    // 4,935 of 5,000 spam addresses are routable on average.
    EXPECT_NEAR(5000 * (1 - expected), 4935, 0.5);
}

TEST(Routability, UniformSampleConvergesToExactShare)
{
    const auto policy = RoutabilityPolicy::bitcoin_core_default();
    const double p = hand_computed_v4_excluded_share();
    std::mt19937_64 gen(2024);
    const int n = 1'000'000;
    int unroutable = 0;
    for (int i = 0; i < n; ++i) {
        if (!is_routable(NetAddress::v4(static_cast<std::uint32_t>(gen())), policy)) ++unroutable;
    }
    const double share = static_cast<double>(unroutable) / n;
    EXPECT_NEAR(share, 0.013, 0.001);
    EXPECT_NEAR(share, p, 5 * std::sqrt(p * (1 - p) / n));
}

TEST(Routability, NormalizesNestedBlocksAndHostBits)
{
    RoutabilityPolicy policy({*Cidr::parse("10.0.0.0/8"), *Cidr::parse("10.1.2.3/16"), *Cidr::parse("11.0.0.0/8")});
    ASSERT_EQ(policy.blocks().size(), 2u);
    EXPECT_EQ(policy.blocks()[0].to_string(), "10.0.0.0/8");
    EXPECT_DOUBLE_EQ(policy.excluded_v4_fraction(), 2.0 / 256);
    for (std::size_t i = 0; i < policy.blocks().size(); ++i) {
        for (std::size_t j = 0; j < policy.blocks().size(); ++j) {
            if (i != j) EXPECT_FALSE(policy.blocks()[i].contains(policy.blocks()[j]));
        }
    }
}

TEST(Routability, LoadsFileFormatAndNamesBadLine)
{
    std::istringstream ok("# reserved\n127.0.0.0/8\n\n10.0.0.0/8  # private\n");
    const auto policy = RoutabilityPolicy::load(ok);
    EXPECT_EQ(policy.blocks().size(), 2u);
    EXPECT_FALSE(is_routable(addr("10.9.9.9"), policy));
    EXPECT_TRUE(is_routable(addr("192.168.0.1"), policy));

    std::istringstream bad("127.0.0.0/8\n10.0.0.0/33\n");
    try {
        RoutabilityPolicy::load(bad, "blocks.txt");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_NE(std::string(e.what()).find("blocks.txt:2"), std::string::npos);
    }
}

TEST(AsMap, CategorizesAndDefaults)
{
    std::istringstream in("asn,category\n16509,cloud\n3320,isp\n8075,both\n");
    const auto map = AsMap::load(in);
    EXPECT_EQ(categorize_as(16509, map).category, AsCategory::CloudProvider);
    EXPECT_EQ(categorize_as(3320, map).category, AsCategory::Isp);
    EXPECT_EQ(categorize_as(8075, map).category, AsCategory::Both);
    EXPECT_EQ(categorize_as(1, map).category, AsCategory::Uncategorized);
    EXPECT_EQ(categorize_as(1, map).asn, 1u);
}

TEST(AsMap, MalformedRowNamesTheRow)
{
    std::istringstream in("asn,category\n16509,cloud\nabc,isp\n");
    try {
        AsMap::load(in, "as.csv");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    std::istringstream bad_cat("asn,category\n1,satellite\n");
    EXPECT_THROW(AsMap::load(bad_cat), ParseError);
    std::istringstream bad_header("asn,kind\n");
    EXPECT_THROW(AsMap::load(bad_header), ParseError);
}

TEST(SpamBatch, BatchShape)
{
    const Timestamp ts{1000};
    const auto batch = make_spam_batch(1, kSpamRecordsPerSession, ts);
    ASSERT_EQ(batch.size(), 5000u);
    std::set<NetAddress> unique;
    for (const auto& r : batch) {
        EXPECT_TRUE(r.address.is_v4());
        EXPECT_EQ(r.timestamp, ts);
        unique.insert(r.address);
    }
    EXPECT_EQ(unique.size(), 5000u);
    EXPECT_EQ(make_spam_batch(1, 5000, ts), batch);
    EXPECT_NE(make_spam_batch(2, 5000, ts), batch);
    EXPECT_EQ(kSpamMessagesPerSession * kSpamRecordsPerMessage, 5000u);
}

TEST(SpamBatch, RoutableCountAveragesExpectedValue)
{
    const auto policy = RoutabilityPolicy::bitcoin_core_default();
    double sum = 0;
    const int batches = 200;
    for (int s = 0; s < batches; ++s) {
        const auto batch = make_spam_batch(static_cast<std::uint64_t>(s), 5000, Timestamp{0});
        sum += static_cast<double>(std::count_if(batch.begin(), batch.end(),
                                                 [&](const AddrRecord& r) { return is_routable(r.address, policy); }));
    }
    // Standard error of the mean is about 0.57 here.
    EXPECT_NEAR(sum / batches, 4935, 3);
}

TEST(SpamBatch, RejectsImpossibleCounts)
{
    EXPECT_THROW(make_spam_batch(1, 0, Timestamp{0}), std::invalid_argument);
    EXPECT_THROW(make_spam_batch(1, (std::size_t{1} << 32) + 1, Timestamp{0}), std::invalid_argument);
}

TEST(SpamBatch, IssuerNeverRepeatsATupleAcrossVictims)
{
    SpamBatchIssuer issuer;
    const Timestamp ts{500};
    // Same seed on purpose: the issuer must redraw the collisions.
    const auto a = issuer.issue(9, 5000, ts);
    const auto b = issuer.issue(9, 5000, ts);
    std::set<AddrRecord> seen(a.begin(), a.end());
    for (const auto& r : b) EXPECT_FALSE(seen.contains(r));
    EXPECT_EQ(std::set<AddrRecord>(b.begin(), b.end()).size(), 5000u);
    // A different timestamp may reuse addresses.
    const auto c = issuer.issue(9, 5000, Timestamp{501});
    EXPECT_EQ(c.front().address, a.front().address);
}

TEST(Rng, DerivedSeedsAreStableAndIndependent)
{
    EXPECT_EQ(derive_seed(1, "relay", 3), derive_seed(1, "relay", 3));
    EXPECT_NE(derive_seed(1, "relay", 3), derive_seed(1, "relay", 4));
    EXPECT_NE(derive_seed(1, "relay", 3), derive_seed(1, "spam", 3));
    EXPECT_NE(derive_seed(1, "relay", 3), derive_seed(2, "relay", 3));
    Rng r(1);
    for (int i = 0; i < 1000; ++i) {
        EXPECT_LT(r.below(7), 7u);
        const auto x = r.between(-3, 3);
        EXPECT_GE(x, -3);
        EXPECT_LE(x, 3);
        const double u = r.unit();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
}

TEST(Csv, SplitFormatAndParse)
{
    EXPECT_EQ(split_csv("a,b,,c"), (std::vector<std::string>{"a", "b", "", "c"}));
    EXPECT_EQ(format_double(2.5), "2.500000");
    EXPECT_EQ(format_double(1.0 / 3, 3), "0.333");
    std::ostringstream out;
    write_csv_row(out, {"x", "1"});
    EXPECT_EQ(out.str(), "x,1\n");

    std::istringstream in("a,b\n1,2\n\n3\n");
    CsvReader reader(in, "t.csv");
    reader.expect_header({"a", "b"});
    auto row = reader.next();
    ASSERT_TRUE(row);
    EXPECT_EQ(parse_int_field(reader, (*row)[0]), 1);
    EXPECT_DOUBLE_EQ(parse_double_field(reader, (*row)[1]), 2.0);
    try {
        reader.next();
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4u);
    }
}
