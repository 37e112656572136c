// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <addrnet/network.hpp>

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace addrnet {

enum class EventKind { ConnOpen, ConnClose, AddrMsg };

std::string_view to_string(EventKind kind);

/**
 * One observation made by a logging peer (monitor, sentinel or probe tester).
 * `remote` is the address of the other endpoint: the dialed address when the
 * observer initiated the connection, otherwise the remote's first address.
 */
struct LogEvent {
    std::int64_t time_ms = 0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::ConnOpen;
    PeerId observer = 0;
    NetAddress remote;
    Direction direction = Direction::Outbound;
    ConnId conn = 0;
    CloseReason reason = CloseReason::Closed;  // ConnClose only
    std::vector<AddrRecord> records;           // AddrMsg only

    std::int64_t time_seconds() const { return time_ms / 1000; }

    friend bool operator==(const LogEvent&, const LogEvent&) = default;
};

/**
 * Append-only list of events ordered by (time, seq).
 *
 * Text form, one CSV line per event after the header
 *   time_ms,seq,kind,observer,remote,direction,conn,reason,records
 * where kind is CONN_OPEN, CONN_CLOSE or ADDR; direction is in or out;
 * reason is closed, evicted or refused on CONN_CLOSE and empty otherwise;
 * records is a ';'-separated list of addr@timestamp on ADDR and empty otherwise.
 */
class EventLog {
public:
    static constexpr std::string_view kHeader = "time_ms,seq,kind,observer,remote,direction,conn,reason,records";

    /// Throws EngineError if the event would break the (time, seq) order.
    void append(LogEvent event);

    const std::vector<LogEvent>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }
    bool empty() const { return events_.empty(); }

    void write(std::ostream& out) const;
    /// Throws ParseError with the 1-based line number of the first bad line.
    static EventLog read(std::istream& in, const std::string& source = "<log>");
    static EventLog read_file(const std::string& path);
    void write_file(const std::string& path) const;

    friend bool operator==(const EventLog&, const EventLog&) = default;

private:
    std::vector<LogEvent> events_;
};

}  // namespace addrnet
