// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <addrnet/csv.hpp>
#include <addrnet/error.hpp>
#include <addrnet/event_log.hpp>

#include <charconv>
#include <fstream>

namespace addrnet {

std::string_view to_string(EventKind kind)
{
    switch (kind) {
    case EventKind::ConnOpen: return "CONN_OPEN";
    case EventKind::ConnClose: return "CONN_CLOSE";
    case EventKind::AddrMsg: return "ADDR";
    }
    return "ADDR";
}

void EventLog::append(LogEvent event)
{
    if (!events_.empty()) {
        const auto& last = events_.back();
        if (event.time_ms < last.time_ms || (event.time_ms == last.time_ms && event.seq <= last.seq)) {
            throw EngineError("log events must be appended in (time, seq) order");
        }
    }
    events_.push_back(std::move(event));
}

void EventLog::write(std::ostream& out) const
{
    out << kHeader << '\n';
    std::string line;
    for (const auto& e : events_) {
        line.clear();
        line += std::to_string(e.time_ms);
        line += ',';
        line += std::to_string(e.seq);
        line += ',';
        line += to_string(e.kind);
        line += ',';
        line += std::to_string(e.observer);
        line += ',';
        line += e.remote.to_string();
        line += ',';
        line += e.direction == Direction::Inbound ? "in" : "out";
        line += ',';
        line += std::to_string(e.conn);
        line += ',';
        if (e.kind == EventKind::ConnClose) line += to_string(e.reason);
        line += ',';
        for (std::size_t i = 0; i < e.records.size(); ++i) {
            if (i) line += ';';
            line += to_string(e.records[i]);
        }
        line += '\n';
        out << line;
    }
}

namespace {

template <typename T>
T parse_number(const CsvReader& reader, std::string_view text, const char* field)
{
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        reader.fail(std::string("malformed ") + field + " '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

EventLog EventLog::read(std::istream& in, const std::string& source)
{
    EventLog log;
    CsvReader reader(in, source);
    reader.expect_header({"time_ms", "seq", "kind", "observer", "remote", "direction", "conn", "reason", "records"});
    while (auto row = reader.next()) {
        const auto& f = *row;
        LogEvent e;
        e.time_ms = parse_number<std::int64_t>(reader, f[0], "time");
        e.seq = parse_number<std::uint64_t>(reader, f[1], "seq");
        if (f[2] == "CONN_OPEN") {
            e.kind = EventKind::ConnOpen;
        } else if (f[2] == "CONN_CLOSE") {
            e.kind = EventKind::ConnClose;
        } else if (f[2] == "ADDR") {
            e.kind = EventKind::AddrMsg;
        } else {
            reader.fail("unknown event kind '" + f[2] + "'");
        }
        e.observer = parse_number<PeerId>(reader, f[3], "observer");
        auto remote = NetAddress::parse(f[4]);
        if (!remote) reader.fail("malformed address '" + f[4] + "'");
        e.remote = *remote;
        if (f[5] == "in") {
            e.direction = Direction::Inbound;
        } else if (f[5] == "out") {
            e.direction = Direction::Outbound;
        } else {
            reader.fail("malformed direction '" + f[5] + "'");
        }
        e.conn = parse_number<ConnId>(reader, f[6], "conn");
        if (e.kind == EventKind::ConnClose) {
            if (f[7] == "closed") {
                e.reason = CloseReason::Closed;
            } else if (f[7] == "evicted") {
                e.reason = CloseReason::Evicted;
            } else if (f[7] == "refused") {
                e.reason = CloseReason::Refused;
            } else {
                reader.fail("malformed close reason '" + f[7] + "'");
            }
        } else if (!f[7].empty()) {
            reader.fail("close reason on a non-close event");
        }
        if (e.kind == EventKind::AddrMsg) {
            std::string_view rest = f[8];
            if (rest.empty()) reader.fail("ADDR event without records");
            while (!rest.empty()) {
                auto semi = rest.find(';');
                auto item = rest.substr(0, semi);
                auto rec = parse_record(item);
                if (!rec) reader.fail("malformed record '" + std::string(item) + "'");
                e.records.push_back(*rec);
                if (semi == std::string_view::npos) break;
                rest.remove_prefix(semi + 1);
            }
        } else if (!f[8].empty()) {
            reader.fail("records on a non-ADDR event");
        }
        try {
            log.append(std::move(e));
        } catch (const EngineError&) {
            reader.fail("event out of (time, seq) order");
        }
    }
    return log;
}

EventLog EventLog::read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open log " + path);
    return read(in, path);
}

void EventLog::write_file(const std::string& path) const
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write log " + path);
    write(out);
}

}  // namespace addrnet
