// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <addrnet/rng.hpp>
#include <addrnet/spam.hpp>

#include <stdexcept>

namespace addrnet {

namespace {

constexpr std::uint64_t kV4Space = std::uint64_t{1} << 32;

std::vector<AddrRecord> draw(std::uint64_t seed, std::size_t count, Timestamp ts,
                             const std::unordered_set<std::uint32_t>* taken,
                             std::unordered_set<std::uint32_t>* record_into)
{
    if (count == 0) throw std::invalid_argument("spam batch count must be at least 1");
    const std::size_t already = taken ? taken->size() : 0;
    if (count > kV4Space - already) throw std::invalid_argument("spam batch larger than the free v4 space");

    Rng rng(seed);
    std::unordered_set<std::uint32_t> seen;
    seen.reserve(count * 2);
    std::vector<AddrRecord> out;
    out.reserve(count);
    while (out.size() < count) {
        auto value = static_cast<std::uint32_t>(rng.next() >> 32);
        if (taken && taken->contains(value)) continue;
        if (!seen.insert(value).second) continue;
        out.push_back(AddrRecord{NetAddress::v4(value), ts});
    }
    if (record_into) record_into->insert(seen.begin(), seen.end());
    return out;
}

}  // namespace

std::vector<AddrRecord> make_spam_batch(std::uint64_t seed, std::size_t count, Timestamp ts)
{
    return draw(seed, count, ts, nullptr, nullptr);
}

std::vector<AddrRecord> SpamBatchIssuer::issue(std::uint64_t seed, std::size_t count, Timestamp ts)
{
    auto& used = used_[ts.seconds];
    // draw() reads `used` and only appends once the batch is complete
    std::unordered_set<std::uint32_t> fresh;
    auto batch = draw(seed, count, ts, &used, &fresh);
    used.insert(fresh.begin(), fresh.end());
    return batch;
}

void SpamBatchIssuer::forget_before(Timestamp ts)
{
    used_.erase(used_.begin(), used_.lower_bound(ts.seconds));
}

}  // namespace addrnet
