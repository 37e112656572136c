// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <addrnet/net_address.hpp>

#include <arpa/inet.h>

#include <charconv>
#include <cstring>

namespace addrnet {

namespace {

std::uint64_t mix64(std::uint64_t x)
{
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

std::optional<std::uint16_t> parse_port(std::string_view text)
{
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || value > 65535) return std::nullopt;
    return static_cast<std::uint16_t>(value);
}

}  // namespace

NetAddress NetAddress::v4(std::uint32_t value, std::uint16_t port)
{
    NetAddress a;
    a.family_ = Family::V4;
    a.bytes_[12] = static_cast<std::uint8_t>(value >> 24);
    a.bytes_[13] = static_cast<std::uint8_t>(value >> 16);
    a.bytes_[14] = static_cast<std::uint8_t>(value >> 8);
    a.bytes_[15] = static_cast<std::uint8_t>(value);
    a.port_ = port;
    return a;
}

NetAddress NetAddress::v6(const std::array<std::uint8_t, 16>& bytes, std::uint16_t port)
{
    NetAddress a;
    a.family_ = Family::V6;
    a.bytes_ = bytes;
    a.port_ = port;
    return a;
}

std::uint32_t NetAddress::v4_value() const
{
    return (std::uint32_t{bytes_[12]} << 24) | (std::uint32_t{bytes_[13]} << 16) |
           (std::uint32_t{bytes_[14]} << 8) | std::uint32_t{bytes_[15]};
}

std::optional<NetAddress> NetAddress::parse(std::string_view text)
{
    std::string host;
    std::uint16_t port = kDefaultPort;

    if (!text.empty() && text.front() == '[') {
        auto close = text.find(']');
        if (close == std::string_view::npos) return std::nullopt;
        host = std::string(text.substr(1, close - 1));
        auto rest = text.substr(close + 1);
        if (!rest.empty()) {
            if (rest.front() != ':') return std::nullopt;
            auto p = parse_port(rest.substr(1));
            if (!p) return std::nullopt;
            port = *p;
        }
    } else {
        auto colon = text.find(':');
        if (colon != std::string_view::npos && text.find(':', colon + 1) == std::string_view::npos) {
            // exactly one colon: v4 with port
            host = std::string(text.substr(0, colon));
            auto p = parse_port(text.substr(colon + 1));
            if (!p) return std::nullopt;
            port = *p;
        } else {
            host = std::string(text);
        }
    }

    in_addr a4{};
    if (inet_pton(AF_INET, host.c_str(), &a4) == 1) {
        return v4(ntohl(a4.s_addr), port);
    }
    in6_addr a6{};
    if (inet_pton(AF_INET6, host.c_str(), &a6) == 1) {
        std::array<std::uint8_t, 16> bytes{};
        std::memcpy(bytes.data(), &a6, 16);
        return v6(bytes, port);
    }
    return std::nullopt;
}

std::string NetAddress::host_string() const
{
    char buf[INET6_ADDRSTRLEN] = {};
    if (is_v4()) {
        in_addr a4{};
        a4.s_addr = htonl(v4_value());
        inet_ntop(AF_INET, &a4, buf, sizeof(buf));
    } else {
        in6_addr a6{};
        std::memcpy(&a6, bytes_.data(), 16);
        inet_ntop(AF_INET6, &a6, buf, sizeof(buf));
    }
    return buf;
}

std::string NetAddress::to_string() const
{
    if (is_v4()) return host_string() + ":" + std::to_string(port_);
    return "[" + host_string() + "]:" + std::to_string(port_);
}

std::size_t NetAddress::hash() const
{
    std::uint64_t hi = 0, lo = 0;
    std::memcpy(&hi, bytes_.data(), 8);
    std::memcpy(&lo, bytes_.data() + 8, 8);
    std::uint64_t h = mix64(hi ^ (std::uint64_t{port_} << 8) ^ static_cast<std::uint64_t>(family_));
    return static_cast<std::size_t>(mix64(h ^ lo));
}

std::string to_string(const AddrRecord& record)
{
    return record.address.to_string() + "@" + std::to_string(record.timestamp.seconds);
}

std::optional<AddrRecord> parse_record(std::string_view text)
{
    auto at = text.rfind('@');
    if (at == std::string_view::npos) return std::nullopt;
    auto addr = NetAddress::parse(text.substr(0, at));
    if (!addr) return std::nullopt;
    auto ts_text = text.substr(at + 1);
    std::int64_t ts = 0;
    auto [ptr, ec] = std::from_chars(ts_text.data(), ts_text.data() + ts_text.size(), ts);
    if (ec != std::errc{} || ptr != ts_text.data() + ts_text.size() || ts < 0) return std::nullopt;
    return AddrRecord{*addr, Timestamp{ts}};
}

}  // namespace addrnet
