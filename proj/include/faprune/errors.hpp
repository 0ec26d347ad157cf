#pragma once

#include <stdexcept>
#include <string>

namespace faprune {

// CLI exit-code mapping: ConfigError -> 1, FormatError -> 2, RunError -> 3.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

struct RunError : std::runtime_error {
    explicit RunError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace faprune
