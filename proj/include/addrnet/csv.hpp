// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <cstddef>
#include <initializer_list>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace addrnet {

/// Splits on ',' without quoting; none of the formats here need it.
std::vector<std::string> split_csv(std::string_view line);

/// Reads a header-first CSV stream with a fixed column count.
class CsvReader {
public:
    CsvReader(std::istream& in, std::string source);

    /// Throws ParseError unless the first line equals `columns`.
    void expect_header(std::initializer_list<std::string_view> columns);

    /// Next data row; blank lines skipped. Rows with a wrong column count throw.
    std::optional<std::vector<std::string>> next();

    std::size_t line() const { return line_; }
    const std::string& source() const { return source_; }

    /// Throws a ParseError for the current line.
    [[noreturn]] void fail(const std::string& what) const;

private:
    std::istream& in_;
    std::string source_;
    std::size_t line_ = 0;
    std::size_t columns_ = 0;
};

/// Fixed-precision formatting so report files are byte-stable.
std::string format_double(double value, int precision = 6);

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

double parse_double_field(const CsvReader& reader, const std::string& text);
long long parse_int_field(const CsvReader& reader, const std::string& text);

}  // namespace addrnet
