// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <addrnet/net_address.hpp>

#include <cstddef>
#include <cstdint>
#include <map>
#include <unordered_set>
#include <vector>

namespace addrnet {

/// Records per spam session and their split into messages.
inline constexpr std::size_t kSpamMessagesPerSession = 500;
inline constexpr std::size_t kSpamRecordsPerMessage = 10;
inline constexpr std::size_t kSpamRecordsPerSession = kSpamMessagesPerSession * kSpamRecordsPerMessage;

/**
 * `count` distinct IPv4 addresses drawn uniformly over the whole v4 space
 * (reserved blocks included), all stamped with `ts`. Deterministic in `seed`.
 * Throws std::invalid_argument for count == 0 or count > 2^32.
 */
std::vector<AddrRecord> make_spam_batch(std::uint64_t seed, std::size_t count, Timestamp ts);

/**
 * Hands out spam batches so that no (address, timestamp) pair is ever issued
 * twice: a batch for a second victim with the same timestamp redraws any
 * address already used with that timestamp.
 */
class SpamBatchIssuer {
public:
    std::vector<AddrRecord> issue(std::uint64_t seed, std::size_t count, Timestamp ts);

    /// Drops bookkeeping for timestamps older than `ts`.
    void forget_before(Timestamp ts);

private:
    std::map<std::int64_t, std::unordered_set<std::uint32_t>> used_;
};

}  // namespace addrnet
