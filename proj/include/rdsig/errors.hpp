#pragma once

#include <stdexcept>
#include <string>

namespace rdsig {

// Malformed config file, bad CLI value, unparseable input. CLI maps this to
// exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A numeric safety guard tripped (enumeration explosion, degenerate recursion
// state, oracle mismatch). CLI maps this to exit code 3.
struct GuardError : std::runtime_error {
    explicit GuardError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rdsig
