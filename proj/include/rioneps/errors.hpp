#pragma once

#include <stdexcept>
#include <string>

namespace rioneps {

// Rejected configuration: bad sample rate, window size below the minimum,
// inconsistent options.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Unreadable or malformed input data. The message carries file/line context
// where available.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rioneps
