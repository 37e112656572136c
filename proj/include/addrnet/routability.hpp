// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <addrnet/net_address.hpp>

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace addrnet {

struct Cidr {
    Family family = Family::V4;
    std::array<std::uint8_t, 16> prefix{};  // same byte layout as NetAddress
    int length = 0;                         // prefix bits, relative to the family width

    static std::optional<Cidr> parse(std::string_view text);
    bool contains(const NetAddress& addr) const;
    bool contains(const Cidr& other) const;
    std::string to_string() const;

    friend bool operator==(const Cidr&, const Cidr&) = default;
};

/**
 * Set of excluded address blocks. Blocks are normalized on construction:
 * host bits cleared, nested blocks dropped, result sorted. CIDR blocks are
 * either nested or disjoint, so the remaining set is pairwise disjoint.
 */
class RoutabilityPolicy {
public:
    RoutabilityPolicy() = default;
    explicit RoutabilityPolicy(std::vector<Cidr> blocks);

    /// The block set Bitcoin Core treats as unroutable.
    static RoutabilityPolicy bitcoin_core_default();
    /// One CIDR per line; '#' starts a comment. Throws ParseError naming the line.
    static RoutabilityPolicy load(std::istream& in, const std::string& source = "<routability>");
    static RoutabilityPolicy load_file(const std::string& path);

    const std::vector<Cidr>& blocks() const { return blocks_; }
    /// Exact share of the v4 space covered by the excluded blocks.
    double excluded_v4_fraction() const { return excluded_v4_fraction_; }

private:
    friend bool is_routable(const NetAddress&, const RoutabilityPolicy&);

    std::vector<Cidr> blocks_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> v4_nets_;  // (network, mask)
    double excluded_v4_fraction_ = 0.0;
};

bool is_routable(const NetAddress& addr, const RoutabilityPolicy& policy);

}  // namespace addrnet
