// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <addrnet/csv.hpp>
#include <addrnet/degree.hpp>
#include <addrnet/error.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace addrnet {

void EstimatorParams::validate() const
{
    if (min_message_size == 0) throw ConfigError("min_message_size must be positive");
    if (future_window_low_s <= 0 || future_window_high_s <= future_window_low_s) {
        throw ConfigError("need 0 < future_window_low < future_window_high");
    }
    if (min_batch_count < 1) throw ConfigError("min_batch_count must be at least 1");
    if (window_length_s <= 0) throw ConfigError("window_length must be positive");
    if (addresses_per_batch <= 0) throw ConfigError("addresses_per_batch must be positive");
    if (fanout <= 0) throw ConfigError("fanout must be positive");
}

std::map<BatchKey, BatchCount> filter_direct_batches(const EventLog& log, const EstimatorParams& params)
{
    std::map<BatchKey, BatchCount> groups;
    for (const auto& e : log.events()) {
        if (e.kind != EventKind::AddrMsg || e.records.size() < params.min_message_size) continue;
        const std::int64_t received = e.time_seconds();
        for (const auto& r : e.records) {
            const std::int64_t ahead = r.timestamp.seconds - received;
            if (ahead < params.future_window_low_s || ahead > params.future_window_high_s) continue;
            auto [it, inserted] = groups.try_emplace(BatchKey{e.remote, r.timestamp});
            if (inserted) it->second.first_receive_ms = e.time_ms;
            ++it->second.count;
        }
    }
    std::erase_if(groups, [&](const auto& kv) {
        return static_cast<double>(kv.second.count) <= params.min_batch_count;
    });
    return groups;
}

double intermediate_estimate(double count, const EstimatorParams& params)
{
    if (!(count > 0)) throw std::domain_error("batch count must be positive");
    return 1.0 + params.addresses_per_batch / count * params.fanout;
}

double checked_intermediate_estimate(double count, const EstimatorParams& params)
{
    if (!(count > params.min_batch_count)) {
        throw std::domain_error("batch count must exceed min_batch_count");
    }
    return intermediate_estimate(count, params);
}

std::optional<double> median(std::vector<double> values)
{
    if (values.empty()) return std::nullopt;
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return (lower + upper) / 2.0;
}

std::optional<DegreeEstimate> daily_estimate(const NetAddress& subject, std::int64_t day,
                                             const std::vector<double>& intermediates)
{
    auto m = median(intermediates);
    if (!m) return std::nullopt;
    return DegreeEstimate{subject, day, *m, intermediates.size()};
}

std::vector<DegreeEstimate> estimate_degrees(std::span<const EventLog> logs, const EstimatorParams& params)
{
    params.validate();
    std::map<std::pair<NetAddress, std::int64_t>, std::vector<double>> pooled;
    const std::int64_t window_ms = params.window_length_s * 1000;
    for (const auto& log : logs) {
        for (const auto& [key, batch] : filter_direct_batches(log, params)) {
            const std::int64_t day = batch.first_receive_ms / window_ms;
            pooled[{key.sender, day}].push_back(
                checked_intermediate_estimate(static_cast<double>(batch.count), params));
        }
    }
    std::vector<DegreeEstimate> out;
    out.reserve(pooled.size());
    for (const auto& [key, values] : pooled) {
        if (auto est = daily_estimate(key.first, key.second, values)) out.push_back(*est);
    }
    return out;
}

std::vector<double> estimate_errors(std::span<const DegreeEstimate> estimates, const DegreeTruth& truth)
{
    std::vector<double> errors;
    errors.reserve(estimates.size());
    for (const auto& e : estimates) {
        auto it = truth.find({e.subject, e.day});
        if (it == truth.end()) {
            throw Error("no ground truth for " + e.subject.to_string() + " on day " + std::to_string(e.day));
        }
        errors.push_back(std::abs(e.estimate - it->second) / it->second);
    }
    return errors;
}

double validate_estimates(std::span<const DegreeEstimate> estimates, const DegreeTruth& truth)
{
    const auto errors = estimate_errors(estimates, truth);
    if (errors.empty()) return 0.0;
    double sum = 0;
    for (double e : errors) sum += e;
    return sum / static_cast<double>(errors.size());
}

void write_estimates_csv(std::ostream& out, std::span<const DegreeEstimate> estimates)
{
    out << "address,day,n_p,samples\n";
    for (const auto& e : estimates) {
        write_csv_row(out, {e.subject.to_string(), std::to_string(e.day), format_double(e.estimate),
                            std::to_string(e.samples)});
    }
}

std::vector<DegreeEstimate> read_estimates_csv(std::istream& in, const std::string& source)
{
    CsvReader reader(in, source);
    reader.expect_header({"address", "day", "n_p", "samples"});
    std::vector<DegreeEstimate> out;
    while (auto row = reader.next()) {
        auto addr = NetAddress::parse((*row)[0]);
        if (!addr) reader.fail("malformed address '" + (*row)[0] + "'");
        DegreeEstimate e;
        e.subject = *addr;
        e.day = parse_int_field(reader, (*row)[1]);
        e.estimate = parse_double_field(reader, (*row)[2]);
        e.samples = static_cast<std::size_t>(parse_int_field(reader, (*row)[3]));
        out.push_back(e);
    }
    return out;
}

std::vector<std::pair<PeerId, DegreeTruth::value_type>> read_truth_rows(std::istream& in, const std::string& source)
{
    CsvReader reader(in, source);
    reader.expect_header({"address", "peer", "day", "mean_degree"});
    std::vector<std::pair<PeerId, DegreeTruth::value_type>> out;
    while (auto row = reader.next()) {
        auto addr = NetAddress::parse((*row)[0]);
        if (!addr) reader.fail("malformed address '" + (*row)[0] + "'");
        const auto peer = static_cast<PeerId>(parse_int_field(reader, (*row)[1]));
        const auto day = parse_int_field(reader, (*row)[2]);
        const double mean = parse_double_field(reader, (*row)[3]);
        out.push_back({peer, {{*addr, day}, mean}});
    }
    return out;
}

DegreeTruth read_truth_csv(std::istream& in, const std::string& source)
{
    DegreeTruth truth;
    for (auto& [peer, kv] : read_truth_rows(in, source)) truth.insert(kv);
    return truth;
}

}  // namespace addrnet
