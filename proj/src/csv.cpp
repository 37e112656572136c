// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <addrnet/csv.hpp>
#include <addrnet/error.hpp>

#include <charconv>
#include <cstdio>
#include <cstdlib>

namespace addrnet {

std::vector<std::string> split_csv(std::string_view line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

CsvReader::CsvReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

void CsvReader::expect_header(std::initializer_list<std::string_view> columns)
{
    std::string header;
    if (!std::getline(in_, header)) throw ParseError(source_, 1, "missing header");
    ++line_;
    if (!header.empty() && header.back() == '\r') header.pop_back();
    auto fields = split_csv(header);
    bool ok = fields.size() == columns.size();
    std::size_t i = 0;
    for (auto c : columns) {
        if (!ok) break;
        ok = fields[i++] == c;
    }
    if (!ok) {
        std::string expected;
        for (auto c : columns) expected += (expected.empty() ? "" : ",") + std::string(c);
        fail("expected header '" + expected + "'");
    }
    columns_ = columns.size();
}

std::optional<std::vector<std::string>> CsvReader::next()
{
    std::string text;
    while (std::getline(in_, text)) {
        ++line_;
        if (!text.empty() && text.back() == '\r') text.pop_back();
        if (text.empty()) continue;
        auto fields = split_csv(text);
        if (columns_ != 0 && fields.size() != columns_) {
            fail("expected " + std::to_string(columns_) + " fields, found " + std::to_string(fields.size()));
        }
        return fields;
    }
    return std::nullopt;
}

void CsvReader::fail(const std::string& what) const { throw ParseError(source_, line_, what); }

std::string format_double(double value, int precision)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, value);
    return buf;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields)
{
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << fields[i];
    }
    out << '\n';
}

double parse_double_field(const CsvReader& reader, const std::string& text)
{
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size()) reader.fail("malformed number '" + text + "'");
    return v;
}

long long parse_int_field(const CsvReader& reader, const std::string& text)
{
    long long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) reader.fail("malformed integer '" + text + "'");
    return v;
}

}  // namespace addrnet
