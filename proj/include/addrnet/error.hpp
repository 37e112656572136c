// Copyright (c) 2026 The addrnet developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace addrnet {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scenario or table content that fails validation. The message names the field.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A malformed line in a text input (log, CSV, block list).
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), line_(line)
    {
    }
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// An engine operation whose precondition does not hold.
class EngineError : public Error {
public:
    using Error::Error;
};

}  // namespace addrnet
