// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <addrnet/as_map.hpp>
#include <addrnet/csv.hpp>
#include <addrnet/error.hpp>

#include <charconv>
#include <fstream>

namespace addrnet {

std::string_view to_string(AsCategory category)
{
    switch (category) {
    case AsCategory::Isp: return "isp";
    case AsCategory::CloudProvider: return "cloud";
    case AsCategory::Both: return "both";
    case AsCategory::Uncategorized: return "uncategorized";
    }
    return "uncategorized";
}

std::optional<AsCategory> parse_category(std::string_view text)
{
    if (text == "isp") return AsCategory::Isp;
    if (text == "cloud") return AsCategory::CloudProvider;
    if (text == "both") return AsCategory::Both;
    if (text == "uncategorized") return AsCategory::Uncategorized;
    return std::nullopt;
}

AsMap AsMap::load(std::istream& in, const std::string& source)
{
    AsMap map;
    CsvReader reader(in, source);
    reader.expect_header({"asn", "category"});
    while (auto row = reader.next()) {
        Asn asn = 0;
        const auto& a = (*row)[0];
        auto [ptr, ec] = std::from_chars(a.data(), a.data() + a.size(), asn);
        if (ec != std::errc{} || ptr != a.data() + a.size()) {
            throw ParseError(source, reader.line(), "malformed asn '" + a + "'");
        }
        auto category = parse_category((*row)[1]);
        if (!category) throw ParseError(source, reader.line(), "unknown category '" + (*row)[1] + "'");
        map.table_[asn] = *category;
    }
    return map;
}

AsMap AsMap::load_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open AS map " + path);
    return load(in, path);
}

AsInfo AsMap::categorize(Asn asn) const
{
    auto it = table_.find(asn);
    return AsInfo{asn, it == table_.end() ? AsCategory::Uncategorized : it->second};
}

}  // namespace addrnet
