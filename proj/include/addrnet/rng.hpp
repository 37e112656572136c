// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace addrnet {

/**
 * Sub-seed for one consumer of randomness: splitmix64 over the root seed, a
 * hash of the domain label and an index. Every actor draws from its own
 * stream, so adding an actor never shifts another actor's draws.
 */
std::uint64_t derive_seed(std::uint64_t root, std::string_view domain, std::uint64_t index = 0);

/// mt19937_64 plus range reductions that are identical on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);

    /// Uniform in [lo, hi].
    std::int64_t between(std::int64_t lo, std::int64_t hi)
    {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    /// Uniform in [0, 1).
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    template <typename T>
    void shuffle(std::vector<T>& v)
    {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace addrnet
