// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <addrnet/error.hpp>
#include <addrnet/routability.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

namespace addrnet {

namespace {

int width(Family f) { return f == Family::V4 ? 32 : 128; }
int offset_bits(Family f) { return f == Family::V4 ? 96 : 0; }

bool prefix_match(const std::array<std::uint8_t, 16>& a, const std::array<std::uint8_t, 16>& b, int start_bit,
                  int bits)
{
    for (int i = start_bit; i < start_bit + bits; ++i) {
        int byte = i / 8, shift = 7 - i % 8;
        if (((a[byte] >> shift) & 1) != ((b[byte] >> shift) & 1)) return false;
    }
    return true;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::optional<Cidr> Cidr::parse(std::string_view text)
{
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return std::nullopt;
    auto host = text.substr(0, slash);
    auto len_text = text.substr(slash + 1);
    int len = 0;
    auto [ptr, ec] = std::from_chars(len_text.data(), len_text.data() + len_text.size(), len);
    if (ec != std::errc{} || ptr != len_text.data() + len_text.size()) return std::nullopt;

    // Bare hosts only; a port would be meaningless here.
    std::string host_str(host);
    auto addr = host_str.find(':') != std::string::npos ? NetAddress::parse("[" + host_str + "]")
                                                        : NetAddress::parse(host_str);
    if (!addr) return std::nullopt;
    if (len < 0 || len > width(addr->family())) return std::nullopt;

    Cidr c;
    c.family = addr->family();
    c.length = len;
    c.prefix = addr->bytes();
    // clear host bits
    for (int i = offset_bits(c.family) + len; i < 128; ++i) {
        c.prefix[i / 8] &= static_cast<std::uint8_t>(~(1u << (7 - i % 8)));
    }
    return c;
}

bool Cidr::contains(const NetAddress& addr) const
{
    if (addr.family() != family) return false;
    return prefix_match(prefix, addr.bytes(), offset_bits(family), length);
}

bool Cidr::contains(const Cidr& other) const
{
    if (other.family != family || other.length < length) return false;
    return prefix_match(prefix, other.prefix, offset_bits(family), length);
}

std::string Cidr::to_string() const
{
    NetAddress a = family == Family::V4 ? NetAddress::v4(NetAddress::v6(prefix).v4_value()) : NetAddress::v6(prefix);
    return a.host_string() + "/" + std::to_string(length);
}

RoutabilityPolicy::RoutabilityPolicy(std::vector<Cidr> blocks)
{
    std::sort(blocks.begin(), blocks.end(), [](const Cidr& a, const Cidr& b) {
        if (a.family != b.family) return a.family < b.family;
        if (a.prefix != b.prefix) return a.prefix < b.prefix;
        return a.length < b.length;
    });
    // After sorting, a nested block follows its container directly or after
    // other blocks nested in the same container.
    for (const auto& b : blocks) {
        if (!blocks_.empty() && blocks_.back().contains(b)) continue;
        blocks_.push_back(b);
    }
    double covered = 0.0;
    for (const auto& b : blocks_) {
        if (b.family != Family::V4) continue;
        covered += std::ldexp(1.0, 32 - b.length);
        std::uint32_t mask = b.length == 0 ? 0 : ~std::uint32_t{0} << (32 - b.length);
        v4_nets_.emplace_back(NetAddress::v6(b.prefix).v4_value(), mask);
    }
    excluded_v4_fraction_ = covered / std::ldexp(1.0, 32);
}

RoutabilityPolicy RoutabilityPolicy::bitcoin_core_default()
{
    static const char* const kBlocks[] = {
        "0.0.0.0/8",       "10.0.0.0/8",      "100.64.0.0/10",  "127.0.0.0/8",
        "169.254.0.0/16",  "172.16.0.0/12",   "192.0.2.0/24",   "192.168.0.0/16",
        "198.18.0.0/15",   "198.51.100.0/24", "203.0.113.0/24", "255.255.255.255/32",
        "::/128",          "::1/128",         "fc00::/7",       "fe80::/10",
        "2001:db8::/32",   "2001:10::/28",    "2001:20::/28",
    };
    std::vector<Cidr> blocks;
    for (const char* text : kBlocks) blocks.push_back(*Cidr::parse(text));
    return RoutabilityPolicy(std::move(blocks));
}

RoutabilityPolicy RoutabilityPolicy::load(std::istream& in, const std::string& source)
{
    std::vector<Cidr> blocks;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view(line);
        if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        auto cidr = Cidr::parse(view);
        if (!cidr) throw ParseError(source, lineno, "malformed CIDR '" + std::string(view) + "'");
        blocks.push_back(*cidr);
    }
    return RoutabilityPolicy(std::move(blocks));
}

RoutabilityPolicy RoutabilityPolicy::load_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open routability file " + path);
    return load(in, path);
}

bool is_routable(const NetAddress& addr, const RoutabilityPolicy& policy)
{
    if (addr.is_v4()) {
        const std::uint32_t v = addr.v4_value();
        for (const auto& [net, mask] : policy.v4_nets_) {
            if ((v & mask) == net) return false;
        }
        return true;
    }
    for (const auto& b : policy.blocks()) {
        if (b.contains(addr)) return false;
    }
    return true;
}

}  // namespace addrnet
