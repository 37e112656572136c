// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <addrnet/error.hpp>
#include <addrnet/scenario.hpp>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace addrnet {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what)
{
    throw ConfigError(path + ": " + what);
}

std::int64_t as_int(const json& j, const std::string& path)
{
    if (!j.is_number_integer()) fail(path, "expected an integer");
    if (j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
        fail(path, "integer out of range");
    }
    return j.get<std::int64_t>();
}

double as_double(const json& j, const std::string& path)
{
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

bool as_bool(const json& j, const std::string& path)
{
    if (!j.is_boolean()) fail(path, "expected true or false");
    return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path)
{
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

Asn as_asn(const json& j, const std::string& path)
{
    const auto v = as_int(j, path);
    if (v < 0 || v > 0xffffffffLL) fail(path, "ASN out of range");
    return static_cast<Asn>(v);
}

int as_small_int(const json& j, const std::string& path)
{
    const auto v = as_int(j, path);
    if (v < INT32_MIN || v > INT32_MAX) fail(path, "integer out of range");
    return static_cast<int>(v);
}

/// Object reader that rejects keys nobody asked for.
class Fields {
public:
    Fields(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) fail(path_, "expected an object");
    }

    const json* get(const std::string& key)
    {
        known_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    std::string at(const std::string& key) const { return path_ + "." + key; }

    template <typename F>
    void with(const std::string& key, F&& f)
    {
        if (const json* v = get(key)) f(*v, at(key));
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!known_.contains(it.key())) fail(at(it.key()), "unknown key");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> known_;
};

template <typename F>
void for_each_item(const json& j, const std::string& path, F&& f)
{
    if (!j.is_array()) fail(path, "expected an array");
    for (std::size_t i = 0; i < j.size(); ++i) f(j[i], path + "[" + std::to_string(i) + "]");
}

IntRange parse_range(const json& j, const std::string& path)
{
    if (j.is_number_integer()) {
        const int v = as_small_int(j, path);
        return {v, v};
    }
    Fields f(j, path);
    IntRange r;
    const json* lo = f.get("min");
    const json* hi = f.get("max");
    if (!lo || !hi) fail(path, "expected an integer or {\"min\", \"max\"}");
    r.min = as_small_int(*lo, f.at("min"));
    r.max = as_small_int(*hi, f.at("max"));
    f.finish();
    if (r.min > r.max) fail(path, "min exceeds max");
    return r;
}

std::vector<Asn> parse_asns(const json& j, const std::string& path)
{
    std::vector<Asn> out;
    for_each_item(j, path, [&](const json& item, const std::string& p) { out.push_back(as_asn(item, p)); });
    return out;
}

AsCategory parse_category_field(const json& j, const std::string& path)
{
    auto c = parse_category(as_string(j, path));
    if (!c) fail(path, "unknown category (isp, cloud, both, uncategorized)");
    return *c;
}

ReachableGroup parse_reachable(const json& j, const std::string& path)
{
    Fields f(j, path);
    ReachableGroup g;
    f.with("name", [&](const json& v, const std::string& p) { g.name = as_string(v, p); });
    f.with("count", [&](const json& v, const std::string& p) { g.count = as_small_int(v, p); });
    f.with("max_connections", [&](const json& v, const std::string& p) { g.max_connections = as_small_int(v, p); });
    f.with("outgoing", [&](const json& v, const std::string& p) { g.outgoing = as_small_int(v, p); });
    f.with("degree", [&](const json& v, const std::string& p) { g.degree = parse_range(v, p); });
    f.with("asns", [&](const json& v, const std::string& p) { g.asns = parse_asns(v, p); });
    f.with("category", [&](const json& v, const std::string& p) { g.category = parse_category_field(v, p); });
    f.with("addresses", [&](const json& v, const std::string& p) { g.addresses = parse_range(v, p); });
    f.with("ipv6", [&](const json& v, const std::string& p) { g.ipv6 = as_bool(v, p); });
    f.with("filler_asns", [&](const json& v, const std::string& p) {
        for_each_item(v, p, [&](const json& item, const std::string& ip) {
            Fields ff(item, ip);
            FillerAsn fa;
            const json* asn = ff.get("asn");
            const json* count = ff.get("count");
            if (!asn || !count) fail(ip, "expected {\"asn\", \"count\"}");
            fa.asn = as_asn(*asn, ff.at("asn"));
            fa.count = as_small_int(*count, ff.at("count"));
            ff.finish();
            g.filler_asns.push_back(fa);
        });
    });
    f.with("send_interval_ms", [&](const json& v, const std::string& p) { g.send_interval_ms = as_int(v, p); });
    f.with("sentinel", [&](const json& v, const std::string& p) { g.sentinel = as_bool(v, p); });
    f.with("spam_target", [&](const json& v, const std::string& p) { g.spam_target = as_bool(v, p); });
    f.with("probe_target", [&](const json& v, const std::string& p) { g.probe_target = as_bool(v, p); });
    f.with("client", [&](const json& v, const std::string& p) { g.client = as_string(v, p); });
    f.finish();
    return g;
}

std::vector<ClientShare> parse_profile(const json& j, const std::string& path)
{
    std::vector<ClientShare> out;
    for_each_item(j, path, [&](const json& item, const std::string& p) {
        Fields f(item, p);
        ClientShare c;
        f.with("client", [&](const json& v, const std::string& q) { c.client = as_string(v, q); });
        const json* o = f.get("outgoing");
        const json* s = f.get("share");
        if (!o || !s) fail(p, "expected {\"client\", \"outgoing\", \"share\"}");
        c.outgoing = static_cast<double>(as_small_int(*o, f.at("outgoing")));
        c.share = as_double(*s, f.at("share"));
        f.finish();
        out.push_back(c);
    });
    return out;
}

UnreachableGroup parse_unreachable(const json& j, const std::string& path)
{
    Fields f(j, path);
    UnreachableGroup g;
    f.with("name", [&](const json& v, const std::string& p) { g.name = as_string(v, p); });
    f.with("count", [&](const json& v, const std::string& p) { g.count = as_small_int(v, p); });
    f.with("asns", [&](const json& v, const std::string& p) { g.asns = parse_asns(v, p); });
    f.with("profile", [&](const json& v, const std::string& p) { g.profile = parse_profile(v, p); });
    f.finish();
    if (g.profile.empty()) g.profile = {{"core", 10, 1.0}};
    return g;
}

SuperPeerSpec parse_super(const json& j, const std::string& path, Asn default_asn)
{
    Fields f(j, path);
    SuperPeerSpec s;
    s.asn = default_asn;
    f.with("count", [&](const json& v, const std::string& p) { s.count = as_small_int(v, p); });
    f.with("asn", [&](const json& v, const std::string& p) { s.asn = as_asn(v, p); });
    f.finish();
    return s;
}

void parse_relay(const json& j, const std::string& path, ScenarioConfig& cfg)
{
    Fields f(j, path);
    auto positive_size = [](const json& v, const std::string& p) {
        const auto x = as_int(v, p);
        if (x <= 0) fail(p, "must be positive");
        return static_cast<std::size_t>(x);
    };
    f.with("accept_future_window_s",
           [&](const json& v, const std::string& p) { cfg.relay.accept_future_window_s = as_int(v, p); });
    f.with("relay_staleness_window_s",
           [&](const json& v, const std::string& p) { cfg.relay.relay_staleness_window_s = as_int(v, p); });
    f.with("relay_size_threshold",
           [&](const json& v, const std::string& p) { cfg.relay.relay_size_threshold = positive_size(v, p); });
    f.with("fanout", [&](const json& v, const std::string& p) { cfg.relay.fanout = positive_size(v, p); });
    f.with("send_interval_ms", [&](const json& v, const std::string& p) { cfg.send_interval_ms = as_int(v, p); });
    f.finish();
}

void parse_spam(const json& j, const std::string& path, SpamSpec& s)
{
    Fields f(j, path);
    f.with("spammers", [&](const json& v, const std::string& p) { s.spammers = as_small_int(v, p); });
    f.with("sessions_per_peer_per_day",
           [&](const json& v, const std::string& p) { s.sessions_per_peer_per_day = as_double(v, p); });
    f.with("ts_offset_min_s", [&](const json& v, const std::string& p) { s.ts_offset_min_s = as_int(v, p); });
    f.with("ts_offset_max_s", [&](const json& v, const std::string& p) { s.ts_offset_max_s = as_int(v, p); });
    f.with("message_interval_ms", [&](const json& v, const std::string& p) { s.message_interval_ms = as_int(v, p); });
    f.with("asn", [&](const json& v, const std::string& p) { s.asn = as_asn(v, p); });
    f.finish();
}

void parse_probe(const json& j, const std::string& path, ProbeSpec& s)
{
    Fields f(j, path);
    f.with("testers", [&](const json& v, const std::string& p) {
        for_each_item(v, p, [&](const json& item, const std::string& ip) {
            Fields tf(item, ip);
            TesterSpec t;
            const json* asn = tf.get("asn");
            if (!asn) fail(ip, "expected {\"asn\"}");
            t.asn = as_asn(*asn, tf.at("asn"));
            tf.finish();
            s.testers.push_back(t);
        });
    });
    f.with("start_s", [&](const json& v, const std::string& p) { s.start_s = as_int(v, p); });
    f.with("spacing_ms", [&](const json& v, const std::string& p) { s.spacing_ms = as_int(v, p); });
    f.with("wait_time_ms", [&](const json& v, const std::string& p) { s.params.wait_time = SimTime{as_int(v, p)}; });
    f.with("extra_connections",
           [&](const json& v, const std::string& p) { s.params.extra_connections = as_small_int(v, p); });
    f.finish();
}

void parse_estimator(const json& j, const std::string& path, EstimatorParams& e)
{
    Fields f(j, path);
    f.with("min_message_size", [&](const json& v, const std::string& p) {
        const auto x = as_int(v, p);
        if (x <= 0) fail(p, "must be positive");
        e.min_message_size = static_cast<std::size_t>(x);
    });
    f.with("future_window_low_s", [&](const json& v, const std::string& p) { e.future_window_low_s = as_int(v, p); });
    f.with("future_window_high_s", [&](const json& v, const std::string& p) { e.future_window_high_s = as_int(v, p); });
    f.with("min_batch_count", [&](const json& v, const std::string& p) { e.min_batch_count = as_double(v, p); });
    f.with("window_length_s", [&](const json& v, const std::string& p) { e.window_length_s = as_int(v, p); });
    f.with("addresses_per_batch", [&](const json& v, const std::string& p) { e.addresses_per_batch = as_double(v, p); });
    f.with("fanout", [&](const json& v, const std::string& p) { e.fanout = as_double(v, p); });
    f.finish();
}

void parse_match(const json& j, const std::string& path, MatchParams& m)
{
    Fields f(j, path);
    auto positive_size = [](const json& v, const std::string& p) {
        const auto x = as_int(v, p);
        if (x <= 0) fail(p, "must be positive");
        return static_cast<std::size_t>(x);
    };
    f.with("min_future_s", [&](const json& v, const std::string& p) { m.min_future_s = as_int(v, p); });
    f.with("min_tuples_per_source",
           [&](const json& v, const std::string& p) { m.min_tuples_per_source = positive_size(v, p); });
    f.with("min_shared_tuples", [&](const json& v, const std::string& p) { m.min_shared_tuples = positive_size(v, p); });
    f.finish();
}

std::string resolve(const std::string& base_dir, const std::string& file)
{
    std::filesystem::path p(file);
    if (p.is_absolute()) return file;
    return (std::filesystem::path(base_dir) / p).string();
}

}  // namespace

void ScenarioConfig::validate() const
{
    if (duration_ms <= 0) throw ConfigError("duration must be positive");
    if (latency_ms < 0) throw ConfigError("latency_ms must be non-negative");
    if (protected_inbound < 0) throw ConfigError("protected_inbound must be non-negative");
    if (redial_delay_s <= 0) throw ConfigError("redial_delay_s must be positive");
    if (redial_attempts < 0) throw ConfigError("redial_attempts must be non-negative");
    if (send_interval_ms <= 0) throw ConfigError("relay.send_interval_ms must be positive");
    relay.validate();
    estimator.validate();
    match.validate();

    std::set<std::string> names;
    for (std::size_t i = 0; i < reachable.size(); ++i) {
        const auto& g = reachable[i];
        const std::string path = "reachable[" + std::to_string(i) + "]";
        if (!g.name.empty() && !names.insert(g.name).second) throw ConfigError(path + ".name: duplicate group name");
        if (g.count < 0) throw ConfigError(path + ".count: must be non-negative");
        if (g.outgoing < 0) throw ConfigError(path + ".outgoing: must be non-negative");
        if (g.max_connections < g.outgoing) throw ConfigError(path + ".max_connections: below outgoing");
        if (g.degree) {
            if (g.degree->max > g.max_connections) {
                throw ConfigError(path + ".degree: exceeds max_connections (" + std::to_string(g.max_connections) + ")");
            }
            if (g.degree->min < g.outgoing) throw ConfigError(path + ".degree: below outgoing");
        }
        if (g.addresses.min < 1) throw ConfigError(path + ".addresses: need at least one address");
        if (g.addresses.max > 16) throw ConfigError(path + ".addresses: at most 16 addresses per peer");
        if (g.send_interval_ms && *g.send_interval_ms <= 0) {
            throw ConfigError(path + ".send_interval_ms: must be positive");
        }
        for (const auto& fa : g.filler_asns) {
            if (fa.count < 0) throw ConfigError(path + ".filler_asns: count must be non-negative");
        }
    }
    for (std::size_t i = 0; i < unreachable.size(); ++i) {
        const auto& g = unreachable[i];
        const std::string path = "unreachable[" + std::to_string(i) + "]";
        if (g.count < 0) throw ConfigError(path + ".count: must be non-negative");
        try {
            avg_outgoing(g.profile);
        } catch (const ConfigError& e) {
            throw ConfigError(path + ".profile: " + e.what());
        }
        for (const auto& c : g.profile) {
            if (c.outgoing < 0) throw ConfigError(path + ".profile: outgoing must be non-negative");
        }
    }
    if (super_peers.count < 0) throw ConfigError("super_peers.count: must be non-negative");
    if (semi_super_peers.count < 0) throw ConfigError("semi_super_peers.count: must be non-negative");
    if (filler.outgoing <= 0) throw ConfigError("filler.outgoing: must be positive");
    if (spam.sessions_per_peer_per_day < 0) throw ConfigError("spam.sessions_per_peer_per_day: must be non-negative");
    if (spam.sessions_per_peer_per_day > 0 && spam.spammers <= 0) throw ConfigError("spam.spammers: must be positive");
    if (spam.ts_offset_min_s < 0 || spam.ts_offset_max_s < spam.ts_offset_min_s) {
        throw ConfigError("spam: need 0 <= ts_offset_min_s <= ts_offset_max_s");
    }
    if (spam.ts_offset_max_s > relay.accept_future_window_s) {
        throw ConfigError("spam.ts_offset_max_s: beyond the accept window, peers would drop the spam");
    }
    if (spam.message_interval_ms <= 0) throw ConfigError("spam.message_interval_ms: must be positive");
    if (probe) {
        if (probe->testers.empty()) throw ConfigError("probe.testers: need at least one tester");
        if (probe->start_s < 0) throw ConfigError("probe.start_s: must be non-negative");
        try {
            probe->params.validate();
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("probe: ") + e.what());
        }
        if (probe->spacing_ms < 2 * probe->params.wait_time.count()) {
            throw ConfigError("probe.spacing_ms: shorter than one probe");
        }
    }
}

ScenarioConfig parse_scenario(const std::string& json_text, const std::string& base_dir)
{
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
    }

    ScenarioConfig cfg;
    Fields f(root, "$");
    f.with("seed", [&](const json& v, const std::string& p) {
        if (!v.is_number_unsigned()) fail(p, "expected a non-negative integer");
        cfg.seed = v.get<std::uint64_t>();
    });
    const json* days = f.get("days");
    const json* duration = f.get("duration_s");
    if (days && duration) fail("$", "give either days or duration_s, not both");
    if (days) {
        const double d = as_double(*days, f.at("days"));
        if (!(d > 0)) fail(f.at("days"), "must be positive");
        cfg.duration_ms = std::llround(d * 86'400'000.0);
    }
    if (duration) cfg.duration_ms = as_int(*duration, f.at("duration_s")) * 1000;
    f.with("latency_ms", [&](const json& v, const std::string& p) { cfg.latency_ms = as_int(v, p); });
    f.with("protected_inbound", [&](const json& v, const std::string& p) { cfg.protected_inbound = as_small_int(v, p); });
    f.with("redial_delay_s", [&](const json& v, const std::string& p) { cfg.redial_delay_s = as_int(v, p); });
    f.with("redial_attempts", [&](const json& v, const std::string& p) { cfg.redial_attempts = as_small_int(v, p); });
    f.with("relay", [&](const json& v, const std::string& p) { parse_relay(v, p, cfg); });
    f.with("routability_file", [&](const json& v, const std::string& p) {
        const auto file = resolve(base_dir, as_string(v, p));
        cfg.routability = RoutabilityPolicy::load_file(file);
    });
    f.with("as_map_file", [&](const json& v, const std::string& p) {
        const auto file = resolve(base_dir, as_string(v, p));
        for (const auto& [asn, cat] : AsMap::load_file(file).entries()) cfg.as_map.set(asn, cat);
    });
    f.with("as_categories", [&](const json& v, const std::string& p) {
        for_each_item(v, p, [&](const json& item, const std::string& ip) {
            Fields af(item, ip);
            const json* asn = af.get("asn");
            const json* cat = af.get("category");
            if (!asn || !cat) fail(ip, "expected {\"asn\", \"category\"}");
            cfg.as_map.set(as_asn(*asn, af.at("asn")), parse_category_field(*cat, af.at("category")));
            af.finish();
        });
    });
    f.with("reachable", [&](const json& v, const std::string& p) {
        for_each_item(v, p, [&](const json& item, const std::string& ip) { cfg.reachable.push_back(parse_reachable(item, ip)); });
    });
    f.with("unreachable", [&](const json& v, const std::string& p) {
        for_each_item(v, p,
                      [&](const json& item, const std::string& ip) { cfg.unreachable.push_back(parse_unreachable(item, ip)); });
    });
    f.with("monitors", [&](const json& v, const std::string& p) {
        if (v.is_number_integer()) {
            const int n = as_small_int(v, p);
            if (n < 0) fail(p, "must be non-negative");
            for (int i = 0; i < n; ++i) cfg.monitors.push_back(64'500u + static_cast<Asn>(i));
            return;
        }
        for_each_item(v, p, [&](const json& item, const std::string& ip) {
            Fields mf(item, ip);
            const json* asn = mf.get("asn");
            if (!asn) fail(ip, "expected {\"asn\"}");
            cfg.monitors.push_back(as_asn(*asn, mf.at("asn")));
            mf.finish();
        });
    });
    f.with("super_peers", [&](const json& v, const std::string& p) { cfg.super_peers = parse_super(v, p, 64'600u); });
    f.with("semi_super_peers",
           [&](const json& v, const std::string& p) { cfg.semi_super_peers = parse_super(v, p, 64'700u); });
    f.with("filler", [&](const json& v, const std::string& p) {
        Fields ff(v, p);
        ff.with("outgoing", [&](const json& x, const std::string& q) { cfg.filler.outgoing = as_small_int(x, q); });
        ff.with("asn_base", [&](const json& x, const std::string& q) { cfg.filler.asn_base = as_asn(x, q); });
        ff.finish();
    });
    f.with("spam", [&](const json& v, const std::string& p) { parse_spam(v, p, cfg.spam); });
    f.with("probe", [&](const json& v, const std::string& p) {
        cfg.probe.emplace();
        parse_probe(v, p, *cfg.probe);
    });
    f.with("estimator", [&](const json& v, const std::string& p) { parse_estimator(v, p, cfg.estimator); });
    f.with("match", [&](const json& v, const std::string& p) { parse_match(v, p, cfg.match); });
    f.with("output_dir", [&](const json& v, const std::string& p) { cfg.output_dir = as_string(v, p); });
    f.finish();

    // Group categories seed the AS map unless the map already names the ASN.
    for (const auto& g : cfg.reachable) {
        if (g.category == AsCategory::Uncategorized) continue;
        for (Asn asn : g.asns) {
            if (!cfg.as_map.entries().contains(asn)) cfg.as_map.set(asn, g.category);
        }
    }

    cfg.validate();
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open scenario " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const auto dir = std::filesystem::path(path).parent_path().string();
    return parse_scenario(ss.str(), dir.empty() ? "." : dir);
}

}  // namespace addrnet
