// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <addrnet/csv.hpp>
#include <addrnet/error.hpp>
#include <addrnet/report.hpp>

#include <cmath>

namespace addrnet {

namespace {

AsCategory lookup(const std::map<NetAddress, AsCategory>& categories, const NetAddress& a)
{
    auto it = categories.find(a);
    return it == categories.end() ? AsCategory::Uncategorized : it->second;
}

}  // namespace

std::vector<HistogramRow> degree_histogram(std::span<const DegreeEstimate> estimates, double bin_width,
                                           const std::map<NetAddress, AsCategory>* categories)
{
    if (!(bin_width > 0)) throw ConfigError("bin width must be positive");
    std::vector<HistogramRow> rows;
    if (estimates.empty()) return rows;

    const double total = static_cast<double>(estimates.size());
    std::map<long long, std::size_t> all;
    std::map<std::pair<AsCategory, long long>, std::size_t> split;
    for (const auto& e : estimates) {
        const auto bin = static_cast<long long>(std::floor(e.estimate / bin_width));
        ++all[bin];
        if (categories) ++split[{lookup(*categories, e.subject), bin}];
    }
    for (const auto& [bin, n] : all) {
        rows.push_back({static_cast<double>(bin) * bin_width, "all", static_cast<double>(n) / total});
    }
    for (const auto& [key, n] : split) {
        rows.push_back({static_cast<double>(key.second) * bin_width, std::string(to_string(key.first)),
                        static_cast<double>(n) / total});
    }
    return rows;
}

std::vector<CategoryStats> category_stats(std::span<const DegreeEstimate> estimates,
                                          const std::map<NetAddress, AsCategory>& categories)
{
    std::map<AsCategory, std::vector<double>> values;
    for (const auto& e : estimates) values[lookup(categories, e.subject)].push_back(e.estimate);
    std::vector<CategoryStats> out;
    for (auto& [cat, v] : values) out.push_back({cat, v.size(), *median(v)});
    return out;
}

void write_histogram_csv(std::ostream& out, std::span<const HistogramRow> rows)
{
    out << "bin,frequency,category\n";
    for (const auto& r : rows) write_csv_row(out, {format_double(r.bin_low, 0), format_double(r.frequency), r.category});
}

void write_category_stats_csv(std::ostream& out, std::span<const CategoryStats> rows)
{
    out << "category,count,median\n";
    for (const auto& r : rows) {
        write_csv_row(out, {std::string(to_string(r.category)), std::to_string(r.count), format_double(r.median)});
    }
}

}  // namespace addrnet
