#pragma once

#include <stdexcept>
#include <string>

namespace fuse {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input data: CSV syntax, join mismatches, schema violations.
// The CLI maps this family to exit code 3.
class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(msg) {}
};

// Bad configuration: unknown keys, out-of-range settings, bad CLI cells.
// The CLI maps this family to exit code 2.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

} // namespace fuse
