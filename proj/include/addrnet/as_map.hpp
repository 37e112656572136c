// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace addrnet {

using Asn = std::uint32_t;

enum class AsCategory { Isp, CloudProvider, Both, Uncategorized };

/// Lower-case CSV spelling: isp, cloud, both, uncategorized.
std::string_view to_string(AsCategory category);
std::optional<AsCategory> parse_category(std::string_view text);

struct AsInfo {
    Asn asn = 0;
    AsCategory category = AsCategory::Uncategorized;

    friend bool operator==(const AsInfo&, const AsInfo&) = default;
};

/// ASN -> category table, loaded from CSV with header `asn,category`.
class AsMap {
public:
    AsMap() = default;

    static AsMap load(std::istream& in, const std::string& source = "<as-map>");
    static AsMap load_file(const std::string& path);

    void set(Asn asn, AsCategory category) { table_[asn] = category; }
    std::size_t size() const { return table_.size(); }
    const std::map<Asn, AsCategory>& entries() const { return table_; }

    /// Uncategorized when the ASN is absent.
    AsInfo categorize(Asn asn) const;

private:
    std::map<Asn, AsCategory> table_;
};

inline AsInfo categorize_as(Asn asn, const AsMap& map) { return map.categorize(asn); }

}  // namespace addrnet
