#pragma once

#include <stdexcept>
#include <string>

namespace mgtd {

// Invalid records, broken invariants, bad file contents. CLI exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Unreachable or misbehaving external service. CLI exit code 3.
class BackendError : public std::runtime_error {
public:
    explicit BackendError(const std::string& what) : std::runtime_error(what) {}
};

// Bad flags, unknown subcommand, unusable configuration. CLI exit code 1.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mgtd
