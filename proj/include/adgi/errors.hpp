#pragma once

#include <stdexcept>
#include <string>

namespace adgi {

// Invalid config or scene input; the CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace adgi
