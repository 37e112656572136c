// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <addrnet/as_map.hpp>
#include <addrnet/degree.hpp>

#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace addrnet {

struct HistogramRow {
    double bin_low = 0;
    std::string category;  // "all" or an AS category name
    double frequency = 0;  // share of all estimates, so category rows stack to the "all" row
};

/**
 * Normalized histogram of estimates with bins [k*w, (k+1)*w). The "all" rows
 * come first, then one row per (category, bin) when `categories` is given;
 * addresses missing from it count as uncategorized. Empty bins are omitted.
 */
std::vector<HistogramRow> degree_histogram(std::span<const DegreeEstimate> estimates, double bin_width = 5,
                                           const std::map<NetAddress, AsCategory>* categories = nullptr);

struct CategoryStats {
    AsCategory category = AsCategory::Uncategorized;
    std::size_t count = 0;
    double median = 0;
};

/// Per-category count and median estimate; categories without estimates are omitted.
std::vector<CategoryStats> category_stats(std::span<const DegreeEstimate> estimates,
                                          const std::map<NetAddress, AsCategory>& categories);

// histogram.csv: bin,frequency,category
void write_histogram_csv(std::ostream& out, std::span<const HistogramRow> rows);
// category_stats.csv: category,count,median
void write_category_stats_csv(std::ostream& out, std::span<const CategoryStats> rows);

}  // namespace addrnet
