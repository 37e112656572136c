// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <addrnet/csv.hpp>
#include <addrnet/error.hpp>
#include <addrnet/probe.hpp>

#include <algorithm>
#include <map>

namespace addrnet {

std::string_view to_string(ProbeClass c)
{
    switch (c) {
    case ProbeClass::FreeSlots: return "FreeSlots";
    case ProbeClass::NearCapacity: return "NearCapacity";
    case ProbeClass::Full: return "Full";
    case ProbeClass::Unreachable: return "Unreachable";
    }
    return "Unreachable";
}

std::optional<ProbeClass> parse_probe_class(std::string_view text)
{
    for (auto c : {ProbeClass::FreeSlots, ProbeClass::NearCapacity, ProbeClass::Full, ProbeClass::Unreachable}) {
        if (to_string(c) == text) return c;
    }
    return std::nullopt;
}

void ProbeParams::validate() const
{
    if (wait_time.count() <= 0) throw ConfigError("probe wait_time must be positive");
    if (extra_connections <= 0) throw ConfigError("probe extra_connections must be positive");
}

ProbeClass classify(const std::vector<bool>& alive, const ProbeParams& params)
{
    if (alive.empty()) return ProbeClass::Unreachable;
    if (!alive.front()) return ProbeClass::Full;
    const bool all = std::all_of(alive.begin(), alive.end(), [](bool b) { return b; });
    if (all && alive.size() == static_cast<std::size_t>(params.extra_connections) + 1) return ProbeClass::FreeSlots;
    return ProbeClass::NearCapacity;
}

ProbeSession::ProbeSession(PeerId tester, NetAddress target, ProbeParams params) : params_(params)
{
    params_.validate();
    outcome_.tester = tester;
    outcome_.target = target;
}

bool ProbeSession::start(Network& net, SimTime now)
{
    outcome_.started = now;
    auto owner = net.owner_of(outcome_.target);
    if (!owner || !net.peer(*owner).spec.reachable || *owner == outcome_.tester) {
        done_ = true;
        outcome_.cls = ProbeClass::Unreachable;
        return false;
    }
    conns_.push_back(net.open_connection(outcome_.tester, outcome_.target, now).conn);
    return true;
}

bool ProbeSession::first_check(Network& net, SimTime now)
{
    if (net.connection(conns_.front()) == nullptr) {
        outcome_.alive = {false};
        outcome_.cls = classify(outcome_.alive, params_);
        done_ = true;
        return false;
    }
    for (int i = 0; i < params_.extra_connections; ++i) {
        conns_.push_back(net.open_connection(outcome_.tester, outcome_.target, now).conn);
    }
    return true;
}

void ProbeSession::finish(Network& net, SimTime now)
{
    outcome_.alive.clear();
    for (ConnId id : conns_) outcome_.alive.push_back(net.connection(id) != nullptr);
    outcome_.cls = classify(outcome_.alive, params_);
    close_survivors(net, now);
    done_ = true;
}

void ProbeSession::close_survivors(Network& net, SimTime now)
{
    for (ConnId id : conns_) {
        if (net.connection(id) != nullptr) net.close_connection(id, now);
    }
}

ProbeOutcome probe_peer(Network& net, PeerId tester, const NetAddress& target, const ProbeParams& params,
                        SimTime now)
{
    ProbeSession session(tester, target, params);
    if (session.start(net, now) && session.first_check(net, now + params.wait_time)) {
        session.finish(net, now + 2 * params.wait_time);
    }
    return session.outcome();
}

double ProbeSummary::fraction(ProbeClass c) const
{
    const double denom = contacted();
    switch (c) {
    case ProbeClass::FreeSlots: return denom > 0 ? free_slots / denom : 0;
    case ProbeClass::NearCapacity: return denom > 0 ? near_capacity / denom : 0;
    case ProbeClass::Full: return denom > 0 ? full / denom : 0;
    case ProbeClass::Unreachable: return targets > 0 ? unreachable / static_cast<double>(targets) : 0;
    }
    return 0;
}

ProbeSummary summarize_probes(std::span<const std::vector<ProbeOutcome>> per_tester)
{
    if (per_tester.empty()) throw ConfigError("probe summary needs at least one tester");
    ProbeSummary s;
    std::size_t attempted = 0;
    for (const auto& outcomes : per_tester) {
        if (outcomes.empty()) throw ConfigError("probe campaign has no targets");
        attempted += outcomes.size();
        for (const auto& o : outcomes) {
            switch (o.cls) {
            case ProbeClass::FreeSlots: s.free_slots += 1; break;
            case ProbeClass::NearCapacity: s.near_capacity += 1; break;
            case ProbeClass::Full: s.full += 1; break;
            case ProbeClass::Unreachable: s.unreachable += 1; break;
            }
        }
    }
    const double n = static_cast<double>(per_tester.size());
    s.free_slots /= n;
    s.near_capacity /= n;
    s.full /= n;
    s.unreachable /= n;
    s.targets = attempted / per_tester.size();
    return s;
}

std::vector<std::vector<ProbeOutcome>> probe_campaign(Network& net, std::span<const PeerId> testers,
                                                      std::span<const NetAddress> targets,
                                                      const ProbeParams& params, SimTime start, SimTime spacing)
{
    if (testers.empty()) throw ConfigError("probe campaign needs at least one tester");
    if (targets.empty()) throw ConfigError("probe campaign has no targets");
    if (spacing < 2 * params.wait_time) throw ConfigError("probe spacing shorter than one probe");
    std::vector<std::vector<ProbeOutcome>> out(testers.size());
    SimTime t = start;
    for (std::size_t i = 0; i < testers.size(); ++i) {
        for (const auto& target : targets) {
            out[i].push_back(probe_peer(net, testers[i], target, params, t));
            t += spacing;
        }
    }
    return out;
}

std::vector<ProbeOutcome> analyze_probe_log(const EventLog& log, const ProbeParams& params)
{
    std::vector<ProbeOutcome> out;
    std::map<ConnId, std::pair<std::size_t, std::size_t>> index;  // conn -> (probe, slot)
    std::size_t live = 0;
    bool in_probe = false;

    for (const auto& e : log.events()) {
        if (e.kind == EventKind::ConnOpen) {
            if (e.direction != Direction::Outbound) continue;
            if (!in_probe || live == 0 || out.back().target != e.remote) {
                ProbeOutcome o;
                o.tester = e.observer;
                o.target = e.remote;
                o.started = SimTime{e.time_ms};
                out.push_back(std::move(o));
                in_probe = true;
            }
            index[e.conn] = {out.size() - 1, out.back().alive.size()};
            out.back().alive.push_back(true);
            ++live;
        } else if (e.kind == EventKind::ConnClose) {
            if (e.reason == CloseReason::Refused) {
                ProbeOutcome o;
                o.tester = e.observer;
                o.target = e.remote;
                o.started = SimTime{e.time_ms};
                out.push_back(std::move(o));
                in_probe = false;
                continue;
            }
            auto it = index.find(e.conn);
            if (it == index.end()) continue;
            if (e.reason == CloseReason::Evicted) out[it->second.first].alive[it->second.second] = false;
            index.erase(it);
            --live;
        }
    }
    for (auto& o : out) o.cls = classify(o.alive, params);
    return out;
}

void write_probe_csv(std::ostream& out, std::span<const ProbeOutcome> outcomes)
{
    out << "tester,target,class,flags\n";
    for (const auto& o : outcomes) {
        std::string flags;
        for (bool b : o.alive) flags += b ? '1' : '0';
        write_csv_row(out, {std::to_string(o.tester), o.target.to_string(), std::string(to_string(o.cls)), flags});
    }
}

void write_probe_summary_csv(std::ostream& out, const ProbeSummary& summary)
{
    out << "class,count,fraction\n";
    for (auto c : {ProbeClass::FreeSlots, ProbeClass::NearCapacity, ProbeClass::Full}) {
        const double count = c == ProbeClass::FreeSlots      ? summary.free_slots
                             : c == ProbeClass::NearCapacity ? summary.near_capacity
                                                             : summary.full;
        write_csv_row(out, {std::string(to_string(c)), format_double(count, 3), format_double(summary.fraction(c))});
    }
    write_csv_row(out, {"Unreachable", format_double(summary.unreachable, 3), ""});
}

}  // namespace addrnet
