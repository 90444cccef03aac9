#pragma once

#include <stdexcept>
#include <string>

namespace stratopt {

// Error taxonomy mirrored by the CLI exit codes:
//   ConfigError / ParseError -> 2, InfeasibleError -> 3, InternalError -> 4.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input data (bad cell, missing column in a data file).
struct ParseError : ConfigError {
    explicit ParseError(const std::string& msg) : ConfigError(msg) {}
};

// A precision constraint cannot be expressed (CV undefined for a target).
struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

// Internal consistency fault (e.g. corrupted incremental caches).
struct InternalError : std::runtime_error {
    explicit InternalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace stratopt
