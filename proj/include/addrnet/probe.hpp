// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <addrnet/event_log.hpp>
#include <addrnet/network.hpp>

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

namespace addrnet {

enum class ProbeClass { FreeSlots, NearCapacity, Full, Unreachable };

std::string_view to_string(ProbeClass c);
std::optional<ProbeClass> parse_probe_class(std::string_view text);

struct ProbeParams {
    SimTime wait_time{3000};
    int extra_connections = 4;

    void validate() const;
};

/**
 * `alive` holds one flag per probe connection opened: whether it was still
 * open when the tester last checked. A probe whose first connection is gone
 * after the first wait opens nothing else, so its flags are {false}. A
 * refused probe has no flags.
 */
struct ProbeOutcome {
    PeerId tester = 0;
    NetAddress target;
    ProbeClass cls = ProbeClass::Unreachable;
    std::vector<bool> alive;
    SimTime started{0};

    friend bool operator==(const ProbeOutcome&, const ProbeOutcome&) = default;
};

/// Full when the first connection died, FreeSlots when all 1 + extra survived,
/// NearCapacity otherwise, Unreachable for no flags.
ProbeClass classify(const std::vector<bool>& alive, const ProbeParams& params);

/**
 * One probe as a three-step state machine, so the simulator can interleave
 * it with other traffic: start() at t, first_check() at t + wait and, when
 * it returns true, finish() at t + 2 * wait. Survivors are closed at the end.
 */
class ProbeSession {
public:
    ProbeSession(PeerId tester, NetAddress target, ProbeParams params);

    /// Opens the first connection. Returns false if the target refused; the probe is then done.
    bool start(Network& net, SimTime now);
    /// Returns true if the extra connections were opened and finish() is due.
    bool first_check(Network& net, SimTime now);
    void finish(Network& net, SimTime now);

    bool done() const { return done_; }
    const ProbeOutcome& outcome() const { return outcome_; }

private:
    void close_survivors(Network& net, SimTime now);

    ProbeParams params_;
    ProbeOutcome outcome_;
    std::vector<ConnId> conns_;
    bool done_ = false;
};

/// Runs one probe to completion on a quiet network, advancing time by up to 2 * wait.
ProbeOutcome probe_peer(Network& net, PeerId tester, const NetAddress& target, const ProbeParams& params,
                        SimTime now);

struct ProbeSummary {
    std::size_t targets = 0;  // probes attempted (per tester, averaged)
    double free_slots = 0;    // counts, averaged over testers
    double near_capacity = 0;
    double full = 0;
    double unreachable = 0;

    double contacted() const { return free_slots + near_capacity + full; }
    double fraction(ProbeClass c) const;
};

/// Averages per-tester class counts. Throws ConfigError if there is no tester or no target.
ProbeSummary summarize_probes(std::span<const std::vector<ProbeOutcome>> per_tester);

/// Every tester probes every target in order, one probe in flight at a time,
/// probes `spacing` apart. Returns outcomes per tester.
std::vector<std::vector<ProbeOutcome>> probe_campaign(Network& net, std::span<const PeerId> testers,
                                                      std::span<const NetAddress> targets,
                                                      const ProbeParams& params, SimTime start, SimTime spacing);

/**
 * Rebuilds outcomes from a tester's connection log: a probe is a run of
 * connections to one target starting while the tester has nothing open;
 * connections the tester closed itself survived, evicted ones did not.
 */
std::vector<ProbeOutcome> analyze_probe_log(const EventLog& log, const ProbeParams& params);

// probe.csv: tester,target,class,flags
void write_probe_csv(std::ostream& out, std::span<const ProbeOutcome> outcomes);
// probe_summary.csv: class,count,fraction
void write_probe_summary_csv(std::ostream& out, const ProbeSummary& summary);

}  // namespace addrnet
