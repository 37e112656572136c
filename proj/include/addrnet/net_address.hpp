// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace addrnet {

enum class Family : std::uint8_t { V4 = 4, V6 = 6 };

/** An IPv4 or IPv6 endpoint. V4 values live in the low 32 bits of `bytes`
 *  (the last four bytes, network order); the first twelve are zero. */
class NetAddress {
public:
    static constexpr std::uint16_t kDefaultPort = 8333;

    NetAddress() = default;

    static NetAddress v4(std::uint32_t value, std::uint16_t port = kDefaultPort);
    static NetAddress v6(const std::array<std::uint8_t, 16>& bytes, std::uint16_t port = kDefaultPort);

    /// Accepts "1.2.3.4", "1.2.3.4:8333", "2001:db8::1" or "[2001:db8::1]:8333".
    static std::optional<NetAddress> parse(std::string_view text);

    Family family() const { return family_; }
    bool is_v4() const { return family_ == Family::V4; }
    std::uint32_t v4_value() const;
    const std::array<std::uint8_t, 16>& bytes() const { return bytes_; }
    std::uint16_t port() const { return port_; }

    /// Host part only, e.g. "10.0.0.1" or "2001:db8::1".
    std::string host_string() const;
    /// Host and port, e.g. "10.0.0.1:8333" or "[2001:db8::1]:8333".
    std::string to_string() const;

    friend bool operator==(const NetAddress&, const NetAddress&) = default;
    friend std::strong_ordering operator<=>(const NetAddress& a, const NetAddress& b)
    {
        if (auto c = a.family_ <=> b.family_; c != 0) return c;
        if (auto c = a.bytes_ <=> b.bytes_; c != 0) return c;
        return a.port_ <=> b.port_;
    }

    std::size_t hash() const;

private:
    Family family_ = Family::V4;
    std::array<std::uint8_t, 16> bytes_{};
    std::uint16_t port_ = 0;
};

/// Seconds since the scenario epoch. Record timestamps use this resolution.
struct Timestamp {
    std::int64_t seconds = 0;

    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

/// An (address, timestamp) pair as carried by addr messages.
struct AddrRecord {
    NetAddress address;
    Timestamp timestamp;

    friend bool operator==(const AddrRecord&, const AddrRecord&) = default;
    friend auto operator<=>(const AddrRecord&, const AddrRecord&) = default;
};

/// "addr@ts", the record encoding used in event logs.
std::string to_string(const AddrRecord& record);
std::optional<AddrRecord> parse_record(std::string_view text);

}  // namespace addrnet

template <>
struct std::hash<addrnet::NetAddress> {
    std::size_t operator()(const addrnet::NetAddress& a) const noexcept { return a.hash(); }
};

template <>
struct std::hash<addrnet::AddrRecord> {
    std::size_t operator()(const addrnet::AddrRecord& r) const noexcept
    {
        return r.address.hash() ^ (static_cast<std::size_t>(r.timestamp.seconds) * 0x9e3779b97f4a7c15ULL);
    }
};
