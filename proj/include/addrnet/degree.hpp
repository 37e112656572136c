// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <addrnet/event_log.hpp>

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace addrnet {

struct EstimatorParams {
    std::size_t min_message_size = 4;
    std::int64_t future_window_low_s = 180;
    std::int64_t future_window_high_s = 600;
    double min_batch_count = 10;  // groups need strictly more records than this
    std::int64_t window_length_s = 86400;
    double addresses_per_batch = 4935;
    double fanout = 2;

    void validate() const;
};

/// Records received from `sender` whose timestamp is `timestamp`.
struct BatchKey {
    NetAddress sender;
    Timestamp timestamp;

    friend auto operator<=>(const BatchKey&, const BatchKey&) = default;
};

struct BatchCount {
    std::size_t count = 0;
    std::int64_t first_receive_ms = 0;
};

/**
 * Counts the spam records a single observer most likely received straight
 * from the peer the spammer contacted: only messages with at least
 * min_message_size records, only records stamped between low and high
 * seconds after receipt, and only groups with more than min_batch_count
 * records survive.
 */
std::map<BatchKey, BatchCount> filter_direct_batches(const EventLog& log, const EstimatorParams& params);

/// 1 + A/c * F, the neighbor count that makes c the expected per-neighbor
/// share of a relayed batch. Throws std::domain_error for c <= 0.
double intermediate_estimate(double count, const EstimatorParams& params);

/// As above, but also rejects counts at or below min_batch_count, which
/// cannot be told apart from indirectly relayed records.
double checked_intermediate_estimate(double count, const EstimatorParams& params);

/// Median; the mean of the middle pair for even sizes. nullopt when empty.
std::optional<double> median(std::vector<double> values);

struct DegreeEstimate {
    NetAddress subject;
    std::int64_t day = 0;
    double estimate = 0;
    std::size_t samples = 0;

    friend bool operator==(const DegreeEstimate&, const DegreeEstimate&) = default;
};

/// Daily median of the intermediate estimates of one subject. nullopt for an empty window.
std::optional<DegreeEstimate> daily_estimate(const NetAddress& subject, std::int64_t day,
                                             const std::vector<double>& intermediates);

/**
 * Full pipeline over one or more observer logs. Batches are counted per log
 * (each observer is a separate neighbor of the subject); intermediates from
 * all logs are pooled per (subject, day). Days are fixed windows of
 * window_length_s starting at the scenario epoch, keyed by the first receipt
 * of each batch. Output is sorted by (subject, day).
 */
std::vector<DegreeEstimate> estimate_degrees(std::span<const EventLog> logs, const EstimatorParams& params);

/// Ground truth per (address, day): the time-weighted mean degree of the owning peer.
using DegreeTruth = std::map<std::pair<NetAddress, std::int64_t>, double>;

/// Mean of |estimate - truth| / truth. Throws Error naming the subject if truth is missing.
double validate_estimates(std::span<const DegreeEstimate> estimates, const DegreeTruth& truth);

/// Per-estimate absolute percentage errors, same order as the input.
std::vector<double> estimate_errors(std::span<const DegreeEstimate> estimates, const DegreeTruth& truth);

// estimates.csv: address,day,n_p,samples
void write_estimates_csv(std::ostream& out, std::span<const DegreeEstimate> estimates);
std::vector<DegreeEstimate> read_estimates_csv(std::istream& in, const std::string& source = "<estimates>");

// truth.csv: address,peer,day,mean_degree
std::vector<std::pair<PeerId, DegreeTruth::value_type>> read_truth_rows(std::istream& in,
                                                                        const std::string& source = "<truth>");
DegreeTruth read_truth_csv(std::istream& in, const std::string& source = "<truth>");

}  // namespace addrnet
