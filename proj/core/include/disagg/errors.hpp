#pragma once

#include <stdexcept>
#include <string>

namespace disagg {

/// Invalid configuration or a dimension mismatch between inputs.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Data violates a documented contract (timestamps, value domains, ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unreadable file content; the message carries path and line number.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem failure with path context.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace disagg
