// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <addrnet/csv.hpp>
#include <addrnet/error.hpp>
#include <addrnet/rng.hpp>
#include <addrnet/simulation.hpp>
#include <addrnet/spam.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <queue>

namespace addrnet {

namespace {

constexpr std::int64_t kDayMs = 86'400'000;
constexpr std::int64_t kPruneIntervalMs = 600'000;

// Address plan. Every peer gets at least one address so logs can name it.
constexpr std::uint32_t kReachableV4 = 0x14000001;  // 20.0.0.1
constexpr std::uint32_t kExtraV4 = 0x15000001;      // 21.0.0.1
constexpr std::uint32_t kUnreachableV4 = 0x1e000001;  // 30.0.0.1
constexpr std::uint32_t kFillerV4 = 0x1f000001;     // 31.0.0.1
constexpr std::uint32_t kMonitorV4 = 0x28000001;    // 40.0.0.1
constexpr std::uint32_t kSpammerV4 = 0x32000001;    // 50.0.0.1
constexpr std::uint32_t kTesterV4 = 0x3c000001;     // 60.0.0.1
constexpr std::uint32_t kSuperV4 = 0x46000001;      // 70.0.0.1

constexpr Asn kReachableAsnBase = 100'000;
constexpr Asn kUnreachableAsnBase = 300'000;

NetAddress extra_v6(std::uint32_t n)
{
    // 2a01:4f8::/32, globally routable
    std::array<std::uint8_t, 16> b{};
    b[0] = 0x2a;
    b[1] = 0x01;
    b[2] = 0x04;
    b[3] = 0xf8;
    b[12] = static_cast<std::uint8_t>(n >> 24);
    b[13] = static_cast<std::uint8_t>(n >> 16);
    b[14] = static_cast<std::uint8_t>(n >> 8);
    b[15] = static_cast<std::uint8_t>(n);
    return NetAddress::v6(b);
}

/// Largest-remainder apportionment of `n` peers over the profile shares.
std::vector<const ClientShare*> apportion(const std::vector<ClientShare>& profile, int n)
{
    double total = 0;
    for (const auto& c : profile) total += c.share;
    std::vector<int> counts(profile.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    int assigned = 0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const double exact = n * profile[i].share / total;
        counts[i] = static_cast<int>(std::floor(exact));
        assigned += counts[i];
        remainders.push_back({exact - counts[i], i});
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (int k = 0; k < n - assigned; ++k) ++counts[remainders[static_cast<std::size_t>(k)].second];
    std::vector<const ClientShare*> out;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        for (int k = 0; k < counts[i]; ++k) out.push_back(&profile[i]);
    }
    return out;
}

struct DegreeTrack {
    std::int64_t last_ms = 0;
    std::int64_t degree = 0;
    std::vector<double> integral;  // degree * ms, per day
};

class Simulator : public NetworkListener {
public:
    Simulator(const ScenarioConfig& cfg, const SimOptions& options)
        : cfg_(cfg),
          net_(NetworkParams{cfg.protected_inbound}),
          setup_rng_(derive_seed(cfg.seed, "setup")),
          trace_(options.trace)
    {
        net_.enable_trace(options.trace);
        days_ = (cfg_.duration_ms + kDayMs - 1) / kDayMs;
    }

    SimResult run()
    {
        cfg_.validate();
        build_peers();
        net_.set_listener(this);
        bootstrap();
        schedule_spam();
        schedule_probes();
        schedule(kPruneIntervalMs, [this] { prune(); });

        while (!queue_.empty() && queue_.top().time <= cfg_.duration_ms) {
            Event ev = queue_.top();
            queue_.pop();
            now_ = ev.time;
            ev.fn();
        }
        now_ = cfg_.duration_ms;
        return finish();
    }

    void on_open(const Connection& c, SimTime now) override
    {
        log_conn(c, now, EventKind::ConnOpen, CloseReason::Closed);
        track(c.initiator, now, +1);
        track(c.acceptor, now, +1);
    }

    void on_close(const Connection& c, SimTime now, CloseReason reason) override
    {
        timers_.erase(timer_key(c.id, true));
        timers_.erase(timer_key(c.id, false));
        log_conn(c, now, EventKind::ConnClose, reason);
        track(c.initiator, now, -1);
        track(c.acceptor, now, -1);
        if (reason != CloseReason::Evicted) return;
        ++result_.stats.evictions;
        const PeerRole role = records_[c.initiator].role;
        if (role == PeerRole::Spammer || role == PeerRole::Tester || cfg_.redial_attempts == 0) return;
        const PeerId who = c.initiator;
        const NetAddress where = c.dialed;
        schedule(now.count() + cfg_.redial_delay_s * 1000, [this, who, where] { redial(who, where, 1); });
    }

private:
    struct Event {
        std::int64_t time;
        std::uint64_t seq;
        std::function<void()> fn;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const
        {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };

    struct SendTimer {
        std::int64_t next = -1;
        bool scheduled = false;
    };

    struct PeerExtra {
        int cap = 0;           // bootstrap ceiling: degree target or max_connections
        int reserved = 0;      // slots held back for dedicated fillers
        int outgoing = 0;      // bootstrap outbound count still owed
        std::int64_t send_ms = 0;
        std::vector<FillerAsn> dedicated;
        bool spam_target = false;
        bool probe_target = false;
        int log_kind = -1;     // 0 monitor, 1 sentinel, 2 tester
        std::size_t log_index = 0;
    };

    void schedule(std::int64_t t, std::function<void()> fn)
    {
        queue_.push(Event{t, next_event_++, std::move(fn)});
    }

    PeerId add(PeerSpec spec, const std::string& group, PeerExtra extra)
    {
        const PeerId id = net_.add_peer(spec);
        PeerRecord r;
        r.id = id;
        r.role = spec.role;
        r.group = group;
        r.addresses = spec.addresses;
        r.reachable = spec.reachable;
        r.as = spec.as;
        r.client = spec.client;
        r.max_connections = spec.max_connections;
        r.outgoing = spec.outgoing_target;
        records_.push_back(r);
        if (extra.send_ms == 0) extra.send_ms = cfg_.send_interval_ms;
        extras_.push_back(std::move(extra));
        tracks_.emplace_back();
        if (spec.reachable) tracks_.back().integral.assign(static_cast<std::size_t>(days_), 0.0);
        specs_.push_back(std::move(spec));
        return id;
    }

    AsInfo as_for(Asn asn, AsCategory fallback) const
    {
        AsInfo info = cfg_.as_map.categorize(asn);
        if (info.category == AsCategory::Uncategorized) info.category = fallback;
        return info;
    }

    void build_peers()
    {
        std::uint32_t next_reachable = kReachableV4, next_extra_v4 = kExtraV4, next_v6 = 1;
        std::uint32_t reachable_index = 0;
        for (const auto& g : cfg_.reachable) {
            for (int i = 0; i < g.count; ++i, ++reachable_index) {
                PeerSpec spec;
                spec.reachable = true;
                spec.max_connections = g.max_connections;
                spec.outgoing_target = g.outgoing;
                spec.client = g.client;
                spec.role = PeerRole::Reachable;
                const Asn asn = g.asns.empty() ? kReachableAsnBase + reachable_index
                                               : g.asns[static_cast<std::size_t>(i) % g.asns.size()];
                spec.as = as_for(asn, g.category);
                spec.addresses.push_back(NetAddress::v4(next_reachable++));
                const auto n_addr = setup_rng_.between(g.addresses.min, g.addresses.max);
                for (std::int64_t k = 1; k < n_addr; ++k) {
                    spec.addresses.push_back(g.ipv6 ? extra_v6(next_v6++) : NetAddress::v4(next_extra_v4++));
                }
                PeerExtra extra;
                extra.cap = g.degree ? static_cast<int>(setup_rng_.between(g.degree->min, g.degree->max))
                                     : g.max_connections;
                extra.outgoing = g.outgoing;
                extra.dedicated = g.filler_asns;
                for (const auto& fa : g.filler_asns) extra.reserved += fa.count;
                extra.send_ms = g.send_interval_ms.value_or(0);
                extra.spam_target = g.spam_target;
                extra.probe_target = g.probe_target;
                if (g.sentinel) {
                    extra.log_kind = 1;
                    extra.log_index = result_.sentinel_logs.size();
                    result_.sentinel_logs.emplace_back();
                }
                reachable_.push_back(add(std::move(spec), g.name, std::move(extra)));
            }
        }

        std::uint32_t next_unreachable = kUnreachableV4, unreachable_index = 0;
        for (const auto& g : cfg_.unreachable) {
            const auto clients = apportion(g.profile, g.count);
            for (int i = 0; i < g.count; ++i, ++unreachable_index) {
                PeerSpec spec;
                spec.max_connections = 125;
                spec.outgoing_target = static_cast<int>(clients[static_cast<std::size_t>(i)]->outgoing);
                spec.max_connections = std::max(spec.max_connections, spec.outgoing_target);
                spec.client = clients[static_cast<std::size_t>(i)]->client;
                spec.role = PeerRole::Unreachable;
                const Asn asn = g.asns.empty() ? kUnreachableAsnBase + unreachable_index
                                               : g.asns[static_cast<std::size_t>(i) % g.asns.size()];
                spec.as = as_for(asn, AsCategory::Uncategorized);
                spec.addresses.push_back(NetAddress::v4(next_unreachable++));
                unreachable_.push_back(add(std::move(spec), g.name, PeerExtra{}));
            }
        }
        next_unreachable_ = next_unreachable;

        std::uint32_t next_monitor = kMonitorV4;
        for (Asn asn : cfg_.monitors) {
            PeerSpec spec;
            spec.max_connections = kUnlimitedConnections;
            spec.outgoing_target = 0;
            spec.role = PeerRole::Monitor;
            spec.client = "monitor";
            spec.as = as_for(asn, AsCategory::Uncategorized);
            spec.addresses.push_back(NetAddress::v4(next_monitor++));
            PeerExtra extra;
            extra.log_kind = 0;
            extra.log_index = result_.monitor_logs.size();
            result_.monitor_logs.emplace_back();
            monitors_.push_back(add(std::move(spec), "monitors", std::move(extra)));
        }

        std::uint32_t next_super = kSuperV4;
        auto add_super = [&](const SuperPeerSpec& s, PeerRole role, std::vector<PeerId>& out) {
            for (int i = 0; i < s.count; ++i) {
                PeerSpec spec;
                spec.max_connections = kUnlimitedConnections;
                spec.outgoing_target = 0;
                spec.role = role;
                spec.as = as_for(s.asn, AsCategory::Uncategorized);
                spec.addresses.push_back(NetAddress::v4(next_super++));
                out.push_back(add(std::move(spec), std::string(to_string(role)), PeerExtra{}));
            }
        };
        add_super(cfg_.super_peers, PeerRole::SuperPeer, super_);
        add_super(cfg_.semi_super_peers, PeerRole::SemiSuperPeer, semi_super_);

        if (cfg_.spam.sessions_per_peer_per_day > 0) {
            for (int i = 0; i < cfg_.spam.spammers; ++i) {
                PeerSpec spec;
                spec.max_connections = kUnlimitedConnections;
                spec.outgoing_target = 0;
                spec.role = PeerRole::Spammer;
                spec.client = "spammer";
                spec.parallel_connections = true;
                spec.as = as_for(cfg_.spam.asn, AsCategory::Uncategorized);
                spec.addresses.push_back(NetAddress::v4(kSpammerV4 + static_cast<std::uint32_t>(i)));
                spammers_.push_back(add(std::move(spec), "spammers", PeerExtra{}));
            }
        }

        if (cfg_.probe) {
            std::uint32_t next_tester = kTesterV4;
            for (const auto& t : cfg_.probe->testers) {
                PeerSpec spec;
                spec.max_connections = kUnlimitedConnections;
                spec.outgoing_target = 0;
                spec.role = PeerRole::Tester;
                spec.client = "tester";
                spec.parallel_connections = true;
                spec.as = as_for(t.asn, AsCategory::Uncategorized);
                spec.addresses.push_back(NetAddress::v4(next_tester++));
                PeerExtra extra;
                extra.log_kind = 2;
                extra.log_index = result_.tester_logs.size();
                result_.tester_logs.emplace_back();
                testers_.push_back(add(std::move(spec), "testers", std::move(extra)));
            }
        }
    }

    int spare(PeerId id) const
    {
        const auto& e = extras_[id];
        return e.cap - static_cast<int>(net_.degree(id)) - e.reserved - e.outgoing;
    }

    const NetAddress& random_address(PeerId id, Rng& rng)
    {
        const auto& addrs = records_[id].addresses;
        return addrs[rng.below(addrs.size())];
    }

    void connect(PeerId from, const NetAddress& to)
    {
        const auto owner = *net_.owner_of(to);
        if (static_cast<int>(net_.degree(owner)) >= extras_[owner].cap) {
            throw ConfigError("peer " + to.to_string() + " (group '" + records_[owner].group +
                              "') has no room for its start-up connections; raise degree or max_connections");
        }
        auto r = net_.open_connection(from, to, SimTime{0});
        if (r.outcome != OpenOutcome::Accepted) throw EngineError("unexpected eviction during start-up");
    }

    /// Picks `n` distinct reachable peers with spare capacity, excluding `self` and current neighbors.
    std::vector<PeerId> pick_targets(PeerId self, int n, Rng& rng)
    {
        std::vector<PeerId> pool;
        for (PeerId r : reachable_) {
            if (r == self || spare(r) <= 0 || net_.connected(self, r)) continue;
            pool.push_back(r);
        }
        rng.shuffle(pool);
        if (static_cast<int>(pool.size()) > n) pool.resize(static_cast<std::size_t>(n));
        return pool;
    }

    void bootstrap()
    {
        for (PeerId m : monitors_) {
            for (PeerId r : reachable_) {
                for (const auto& a : records_[r].addresses) connect(m, a);
            }
        }
        for (PeerId s : super_) {
            for (PeerId r : reachable_) connect(s, records_[r].addresses.front());
        }
        for (PeerId s : semi_super_) {
            std::vector<PeerId> half = reachable_;
            setup_rng_.shuffle(half);
            half.resize(half.size() / 2);
            std::sort(half.begin(), half.end());
            for (PeerId r : half) connect(s, records_[r].addresses.front());
        }

        for (PeerId r : reachable_) {
            if (spare(r) < 0) {
                throw ConfigError("reachable group '" + records_[r].group +
                                  "': monitors and super peers leave no room for its outbound connections");
            }
        }

        std::vector<PeerId> order = reachable_;
        setup_rng_.shuffle(order);
        for (PeerId r : order) {
            auto& e = extras_[r];
            const int want = e.outgoing;
            e.outgoing = 0;  // release the reservation before picking
            auto targets = pick_targets(r, want, setup_rng_);
            if (static_cast<int>(targets.size()) < want) {
                throw ConfigError("reachable group '" + records_[r].group + "': cannot place " + std::to_string(want) +
                                  " outbound connections, too little spare capacity among reachable peers");
            }
            for (PeerId t : targets) connect(r, random_address(t, setup_rng_));
        }

        for (PeerId u : unreachable_) {
            const int want = net_.peer(u).spec.outgoing_target;
            auto targets = pick_targets(u, want, setup_rng_);
            if (static_cast<int>(targets.size()) < want) {
                throw ConfigError("unreachable group '" + records_[u].group +
                                  "': not enough reachable capacity for its outbound connections");
            }
            for (PeerId t : targets) connect(u, random_address(t, setup_rng_));
        }

        fill_degree_targets();

        std::uint32_t next_filler = kFillerV4;
        for (PeerId r : reachable_) {
            auto& e = extras_[r];
            e.reserved = 0;
            for (const auto& fa : e.dedicated) {
                for (int k = 0; k < fa.count; ++k) {
                    PeerSpec spec;
                    spec.max_connections = 125;
                    spec.outgoing_target = 1;
                    spec.role = PeerRole::Unreachable;
                    spec.client = "filler";
                    spec.as = as_for(fa.asn, AsCategory::Uncategorized);
                    spec.addresses.push_back(NetAddress::v4(next_filler++));
                    const PeerId f = add(std::move(spec), "fillers", PeerExtra{});
                    connect(f, random_address(r, setup_rng_));
                }
            }
        }
    }

    void fill_degree_targets()
    {
        std::vector<PeerId> targets;
        for (std::size_t gi = 0, idx = 0; gi < cfg_.reachable.size(); ++gi) {
            for (int i = 0; i < cfg_.reachable[gi].count; ++i, ++idx) {
                if (cfg_.reachable[gi].degree) targets.push_back(reachable_[idx]);
            }
        }
        for (PeerId t : targets) {
            if (spare(t) < 0) {
                throw ConfigError("reachable group '" + records_[t].group +
                                  "': degree target below the connections made at start-up");
            }
        }
        Asn next_asn = cfg_.filler.asn_base;
        for (;;) {
            std::vector<std::pair<int, PeerId>> open;
            for (PeerId t : targets) {
                if (spare(t) > 0) open.push_back({spare(t), t});
            }
            if (open.empty()) break;
            std::sort(open.begin(), open.end(), [](const auto& a, const auto& b) {
                return a.first != b.first ? a.first > b.first : a.second < b.second;
            });
            if (static_cast<int>(open.size()) > cfg_.filler.outgoing) open.resize(static_cast<std::size_t>(cfg_.filler.outgoing));

            PeerSpec spec;
            spec.max_connections = 125;
            spec.outgoing_target = cfg_.filler.outgoing;
            spec.role = PeerRole::Unreachable;
            spec.client = "filler";
            spec.as = as_for(next_asn++, AsCategory::Uncategorized);
            spec.addresses.push_back(NetAddress::v4(next_unreachable_++));
            const PeerId f = add(std::move(spec), "fillers", PeerExtra{});
            for (const auto& [s, t] : open) connect(f, random_address(t, setup_rng_));
        }
    }

    // --- logging and ground truth ---------------------------------------

    NetAddress remote_address(const Connection& c, PeerId local) const
    {
        if (local == c.initiator) return c.dialed;
        return records_[c.initiator].addresses.front();
    }

    EventLog* log_of(PeerId id)
    {
        const auto& e = extras_[id];
        switch (e.log_kind) {
        case 0: return &result_.monitor_logs[e.log_index];
        case 1: return &result_.sentinel_logs[e.log_index];
        case 2: return &result_.tester_logs[e.log_index];
        default: return nullptr;
        }
    }

    void log_conn(const Connection& c, SimTime now, EventKind kind, CloseReason reason)
    {
        for (PeerId local : {c.initiator, c.acceptor}) {
            EventLog* log = log_of(local);
            if (!log) continue;
            LogEvent ev;
            ev.time_ms = now.count();
            ev.seq = next_log_seq_++;
            ev.kind = kind;
            ev.observer = local;
            ev.remote = remote_address(c, local);
            ev.direction = c.direction_for(local);
            ev.conn = c.id;
            if (kind == EventKind::ConnClose) ev.reason = reason;
            log->append(std::move(ev));
        }
    }

    void integrate(DegreeTrack& t, std::int64_t until)
    {
        while (t.last_ms < until) {
            const std::int64_t day = t.last_ms / kDayMs;
            const std::int64_t end = std::min(until, (day + 1) * kDayMs);
            t.integral[static_cast<std::size_t>(day)] += static_cast<double>(t.degree) * static_cast<double>(end - t.last_ms);
            t.last_ms = end;
        }
    }

    void track(PeerId id, SimTime now, int delta)
    {
        auto& t = tracks_[id];
        if (t.integral.empty()) return;
        integrate(t, std::min<std::int64_t>(now.count(), cfg_.duration_ms));
        t.degree += delta;
    }

    // --- addr relay --------------------------------------------------------

    Rng& relay_rng(PeerId id)
    {
        auto it = relay_rngs_.find(id);
        if (it == relay_rngs_.end()) {
            it = relay_rngs_.emplace(id, std::make_unique<Rng>(derive_seed(cfg_.seed, "relay", id))).first;
        }
        return *it->second;
    }

    void deliver(PeerId to, ConnId conn, std::vector<AddrRecord> records)
    {
        const Connection* c = net_.connection(conn);
        if (!c) {
            ++result_.stats.messages_dropped;
            return;
        }
        ++result_.stats.messages_delivered;
        const PeerRole role = records_[to].role;
        if (role == PeerRole::Monitor) {
            LogEvent ev;
            ev.time_ms = now_;
            ev.seq = next_log_seq_++;
            ev.kind = EventKind::AddrMsg;
            ev.observer = to;
            ev.remote = remote_address(*c, to);
            ev.direction = c->direction_for(to);
            ev.conn = conn;
            ev.records = std::move(records);
            log_of(to)->append(std::move(ev));
            return;
        }
        if (role == PeerRole::Spammer || role == PeerRole::Tester) return;

        AddrMessage msg;
        msg.sender = c->remote_of(to);
        msg.conn = conn;
        msg.records = std::move(records);
        msg.sent = SimTime{now_};
        auto& state = net_.peer(to);
        const auto accepted = accept_addr(state, msg, SimTime{now_}, cfg_.relay, cfg_.routability);
        for (const auto& a : accepted) {
            if (!a.relay_eligible) continue;
            for (ConnId target : select_relay_targets(state, conn, relay_rng(to), cfg_.relay.fanout)) {
                auto& box = state.relay.outbox[target];
                box.push_back(a.record);
                if (box.size() == 1) arm_send_timer(to, target);  // a non-empty outbox always has a timer pending
            }
        }
    }

    static std::uint64_t timer_key(ConnId conn, bool initiator_side) { return conn * 2 + (initiator_side ? 0 : 1); }

    std::int64_t next_send_delay(PeerId id)
    {
        const double mean = static_cast<double>(extras_[id].send_ms);
        const double draw = -mean * std::log1p(-relay_rng(id).unit());
        return std::max<std::int64_t>(1, std::llround(draw));
    }

    // Each side of a connection sends queued addr records on its own Poisson
    // timer. A timer that would have fired with nothing queued is redrawn
    // from now, which is the same in distribution.
    void arm_send_timer(PeerId from, ConnId conn)
    {
        const Connection* c = net_.connection(conn);
        auto& t = timers_[timer_key(conn, c->initiator == from)];
        if (t.scheduled) return;
        if (t.next < now_) t.next = now_ + next_send_delay(from);
        t.scheduled = true;
        schedule(t.next, [this, from, conn] { send_queued(from, conn); });
    }

    void send_queued(PeerId from, ConnId conn)
    {
        const Connection* c = net_.connection(conn);
        if (!c) return;
        auto& t = timers_[timer_key(conn, c->initiator == from)];
        t.scheduled = false;
        t.next = now_ + next_send_delay(from);
        auto& state = net_.peer(from);
        auto it = state.relay.outbox.find(conn);
        if (it == state.relay.outbox.end()) return;
        const PeerId remote = c->remote_of(from);
        auto& pending = it->second;
        for (std::size_t off = 0; off < pending.size(); off += kMaxAddrPerMessage) {
            const auto end = std::min(pending.size(), off + kMaxAddrPerMessage);
            std::vector<AddrRecord> chunk(pending.begin() + static_cast<std::ptrdiff_t>(off),
                                          pending.begin() + static_cast<std::ptrdiff_t>(end));
            schedule(now_ + cfg_.latency_ms,
                     [this, remote, conn, chunk = std::move(chunk)]() mutable { deliver(remote, conn, std::move(chunk)); });
        }
        state.relay.outbox.erase(it);
    }

    void prune()
    {
        const Timestamp cutoff{now_ / 1000 - cfg_.relay.relay_staleness_window_s};
        for (PeerId id = 0; id < net_.peer_count(); ++id) net_.peer(id).relay.prune_older_than(cutoff);
        issuer_.forget_before(cutoff);
        schedule(now_ + kPruneIntervalMs, [this] { prune(); });
    }

    // --- redial ------------------------------------------------------------

    void redial(PeerId who, NetAddress where, int attempt)
    {
        const auto& p = net_.peer(who);
        if (static_cast<int>(p.degree()) >= p.spec.max_connections) return;
        for (ConnId cid : p.connections) {
            const Connection* c = net_.connection(cid);
            if (c->initiator == who && c->dialed == where) return;
        }
        ++result_.stats.redials;
        auto r = net_.open_connection(who, where, SimTime{now_});
        if (r.outcome == OpenOutcome::RejectedSelf && attempt < cfg_.redial_attempts) {
            schedule(now_ + cfg_.redial_delay_s * 1000, [this, who, where, attempt] { redial(who, where, attempt + 1); });
        }
    }

    // --- spam --------------------------------------------------------------

    void schedule_spam()
    {
        const auto& s = cfg_.spam;
        if (s.sessions_per_peer_per_day <= 0) return;
        const double days = static_cast<double>(cfg_.duration_ms) / static_cast<double>(kDayMs);
        const auto per_peer = static_cast<std::int64_t>(std::llround(s.sessions_per_peer_per_day * days));
        if (per_peer == 0) return;
        const std::int64_t session_ms =
            cfg_.latency_ms + static_cast<std::int64_t>(kSpamMessagesPerSession) * s.message_interval_ms + 1;
        const double slot = static_cast<double>(cfg_.duration_ms) / static_cast<double>(per_peer);
        if (slot <= static_cast<double>(session_ms)) throw ConfigError("spam: sessions too dense for the duration");

        Rng rng(derive_seed(cfg_.seed, "spam-schedule"));
        std::uint64_t session_index = 0;
        for (PeerId victim : reachable_) {
            if (!extras_[victim].spam_target) continue;
            for (std::int64_t k = 0; k < per_peer; ++k) {
                // Stratified start inside each slot, leaving room for the session to end.
                const double jitter = rng.unit() * (slot - static_cast<double>(session_ms) - 1.0);
                const auto start = static_cast<std::int64_t>(static_cast<double>(k) * slot + 1.0 + jitter);
                const PeerId spammer = spammers_[rng.below(spammers_.size())];
                const NetAddress target = random_address(victim, rng);
                const std::int64_t offset = rng.between(s.ts_offset_min_s, s.ts_offset_max_s);
                const std::uint64_t index = session_index++;
                schedule(start, [this, spammer, target, offset, index] { start_session(spammer, target, offset, index); });
            }
        }
    }

    void start_session(PeerId spammer, NetAddress target, std::int64_t offset, std::uint64_t index)
    {
        ++result_.stats.spam_sessions;
        auto r = net_.open_connection(spammer, target, SimTime{now_});
        if (r.outcome == OpenOutcome::RejectedSelf) {
            ++result_.stats.spam_sessions_rejected;
            return;
        }
        const ConnId conn = r.conn;
        const PeerId victim = *net_.owner_of(target);
        const Timestamp ts{now_ / 1000 + offset};
        auto batch = issuer_.issue(derive_seed(cfg_.seed, "spam-batch", index), kSpamRecordsPerSession, ts);
        const auto& s = cfg_.spam;
        for (std::size_t m = 0; m < kSpamMessagesPerSession; ++m) {
            std::vector<AddrRecord> msg(batch.begin() + static_cast<std::ptrdiff_t>(m * kSpamRecordsPerMessage),
                                        batch.begin() + static_cast<std::ptrdiff_t>((m + 1) * kSpamRecordsPerMessage));
            const std::int64_t at = now_ + cfg_.latency_ms + static_cast<std::int64_t>(m) * s.message_interval_ms;
            schedule(at, [this, victim, conn, msg = std::move(msg)]() mutable { deliver(victim, conn, std::move(msg)); });
        }
        const std::int64_t end = now_ + cfg_.latency_ms +
                                 static_cast<std::int64_t>(kSpamMessagesPerSession - 1) * s.message_interval_ms + 1;
        schedule(end, [this, conn] {
            if (net_.connection(conn)) net_.close_connection(conn, SimTime{now_});
        });
    }

    // --- probes ------------------------------------------------------------

    void schedule_probes()
    {
        if (!cfg_.probe) return;
        const auto& p = *cfg_.probe;
        std::vector<NetAddress> targets;
        for (PeerId r : reachable_) {
            if (extras_[r].probe_target) targets.push_back(records_[r].addresses.front());
        }
        if (targets.empty()) throw ConfigError("probe: no probe targets");
        result_.probe_outcomes.resize(testers_.size());
        std::int64_t t = p.start_s * 1000;
        for (std::size_t k = 0; k < testers_.size(); ++k) {
            for (const auto& target : targets) {
                const PeerId tester = testers_[k];
                schedule(t, [this, tester, target, k] { start_probe(k, tester, target); });
                t += p.spacing_ms;
            }
        }
    }

    void start_probe(std::size_t k, PeerId tester, NetAddress target)
    {
        ++result_.stats.probes;
        const auto& params = cfg_.probe->params;
        auto session = std::make_shared<ProbeSession>(tester, target, params);
        if (!session->start(net_, SimTime{now_})) {
            LogEvent ev;
            ev.time_ms = now_;
            ev.seq = next_log_seq_++;
            ev.kind = EventKind::ConnClose;
            ev.observer = tester;
            ev.remote = target;
            ev.direction = Direction::Outbound;
            ev.reason = CloseReason::Refused;
            log_of(tester)->append(std::move(ev));
            result_.probe_outcomes[k].push_back(session->outcome());
            return;
        }
        const std::int64_t wait = params.wait_time.count();
        schedule(now_ + wait, [this, k, session, wait] {
            if (!session->first_check(net_, SimTime{now_})) {
                result_.probe_outcomes[k].push_back(session->outcome());
                return;
            }
            schedule(now_ + wait, [this, k, session] {
                session->finish(net_, SimTime{now_});
                result_.probe_outcomes[k].push_back(session->outcome());
            });
        });
    }

    // --- results -------------------------------------------------------------

    SimResult finish()
    {
        for (PeerId id = 0; id < tracks_.size(); ++id) {
            auto& t = tracks_[id];
            if (t.integral.empty()) continue;
            integrate(t, cfg_.duration_ms);
            for (std::int64_t d = 0; d < days_; ++d) {
                const std::int64_t len = std::min(cfg_.duration_ms, (d + 1) * kDayMs) - d * kDayMs;
                const double mean = t.integral[static_cast<std::size_t>(d)] / static_cast<double>(len);
                for (const auto& a : records_[id].addresses) result_.truth_rows.push_back({a, id, d, mean});
            }
        }
        result_.peers = records_;
        if (trace_) {
            result_.network_params = net_.params();
            result_.trace = net_.trace();
            result_.final_connections = net_.snapshot();
            result_.specs = specs_;
        }
        return std::move(result_);
    }

    ScenarioConfig cfg_;
    Network net_;
    Rng setup_rng_;
    bool trace_ = false;
    std::int64_t days_ = 1;
    std::int64_t now_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::uint64_t next_event_ = 0;
    std::uint64_t next_log_seq_ = 0;
    std::uint32_t next_unreachable_ = kUnreachableV4;

    std::vector<PeerRecord> records_;
    std::vector<PeerExtra> extras_;
    std::vector<DegreeTrack> tracks_;
    std::vector<PeerSpec> specs_;
    std::vector<PeerId> reachable_, unreachable_, monitors_, super_, semi_super_, spammers_, testers_;
    std::unordered_map<PeerId, std::unique_ptr<Rng>> relay_rngs_;
    std::unordered_map<std::uint64_t, SendTimer> timers_;
    SpamBatchIssuer issuer_;
    SimResult result_;
};

}  // namespace

DegreeTruth SimResult::truth() const
{
    DegreeTruth t;
    for (const auto& r : truth_rows) t[{r.address, r.day}] = r.mean_degree;
    return t;
}

std::map<NetAddress, AsCategory> SimResult::address_categories() const
{
    std::map<NetAddress, AsCategory> out;
    for (const auto& p : peers) {
        for (const auto& a : p.addresses) out[a] = p.as.category;
    }
    return out;
}

std::map<NetAddress, PeerId> SimResult::address_owners() const
{
    std::map<NetAddress, PeerId> out;
    for (const auto& p : peers) {
        for (const auto& a : p.addresses) out[a] = p.id;
    }
    return out;
}

SimResult run_scenario(const ScenarioConfig& cfg, const SimOptions& options)
{
    Simulator sim(cfg, options);
    return sim.run();
}

void write_truth_csv(std::ostream& out, const std::vector<TruthRow>& rows)
{
    out << "address,peer,day,mean_degree\n";
    for (const auto& r : rows) {
        write_csv_row(out, {r.address.to_string(), std::to_string(r.peer), std::to_string(r.day),
                            format_double(r.mean_degree)});
    }
}

void write_peers_csv(std::ostream& out, const std::vector<PeerRecord>& peers)
{
    out << "peer,address,role,group,reachable,asn,category,client,max_connections,outgoing\n";
    for (const auto& p : peers) {
        for (const auto& a : p.addresses) {
            write_csv_row(out, {std::to_string(p.id), a.to_string(), std::string(to_string(p.role)), p.group,
                                p.reachable ? "1" : "0", std::to_string(p.as.asn),
                                std::string(to_string(p.as.category)), p.client, std::to_string(p.max_connections),
                                std::to_string(p.outgoing)});
        }
    }
}

std::vector<PeerRecord> read_peers_csv(std::istream& in, const std::string& source)
{
    CsvReader reader(in, source);
    reader.expect_header(
        {"peer", "address", "role", "group", "reachable", "asn", "category", "client", "max_connections", "outgoing"});
    std::vector<PeerRecord> out;
    while (auto row = reader.next()) {
        const auto& f = *row;
        const auto id = static_cast<PeerId>(parse_int_field(reader, f[0]));
        auto addr = NetAddress::parse(f[1]);
        if (!addr) reader.fail("malformed address '" + f[1] + "'");
        if (!out.empty() && out.back().id == id) {
            out.back().addresses.push_back(*addr);
            continue;
        }
        PeerRecord p;
        p.id = id;
        p.addresses.push_back(*addr);
        bool known_role = false;
        for (auto r : {PeerRole::Reachable, PeerRole::Unreachable, PeerRole::Monitor, PeerRole::Spammer,
                       PeerRole::Tester, PeerRole::SuperPeer, PeerRole::SemiSuperPeer}) {
            if (to_string(r) == f[2]) {
                p.role = r;
                known_role = true;
            }
        }
        if (!known_role) reader.fail("unknown role '" + f[2] + "'");
        p.group = f[3];
        p.reachable = f[4] == "1";
        p.as.asn = static_cast<Asn>(parse_int_field(reader, f[5]));
        auto cat = parse_category(f[6]);
        if (!cat) reader.fail("unknown category '" + f[6] + "'");
        p.as.category = *cat;
        p.client = f[7];
        p.max_connections = static_cast<int>(parse_int_field(reader, f[8]));
        p.outgoing = static_cast<int>(parse_int_field(reader, f[9]));
        out.push_back(std::move(p));
    }
    return out;
}

void write_sim_outputs(const SimResult& result, const std::string& dir)
{
    std::filesystem::create_directories(dir);
    auto path = [&](const std::string& name) { return (std::filesystem::path(dir) / name).string(); };
    auto open = [&](const std::string& name) {
        std::ofstream out(path(name));
        if (!out) throw Error("cannot write " + path(name));
        return out;
    };
    for (std::size_t i = 0; i < result.monitor_logs.size(); ++i) {
        result.monitor_logs[i].write_file(path("monitor-" + std::to_string(i) + ".log"));
    }
    for (std::size_t i = 0; i < result.sentinel_logs.size(); ++i) {
        result.sentinel_logs[i].write_file(path("sentinel-" + std::to_string(i) + ".log"));
    }
    for (std::size_t i = 0; i < result.tester_logs.size(); ++i) {
        result.tester_logs[i].write_file(path("tester-" + std::to_string(i) + ".log"));
    }
    {
        auto out = open("truth.csv");
        write_truth_csv(out, result.truth_rows);
    }
    {
        auto out = open("peers.csv");
        write_peers_csv(out, result.peers);
    }
    if (!result.probe_outcomes.empty()) {
        auto out = open("probe.csv");
        std::vector<ProbeOutcome> all;
        for (const auto& per : result.probe_outcomes) all.insert(all.end(), per.begin(), per.end());
        write_probe_csv(out, all);
    }
}

}  // namespace addrnet
