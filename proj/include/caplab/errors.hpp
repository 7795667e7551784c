#pragma once

#include <stdexcept>
#include <string>

namespace caplab {

// Parameter-domain violations (bad p/lambda, malformed specs). CLI maps these
// to exit code 2.
class InvalidParams : public std::invalid_argument {
public:
    explicit InvalidParams(const std::string& what) : std::invalid_argument(what) {}
};

// Environment problems: unreadable files, malformed JSON, unwritable output.
// CLI maps these to exit code 3.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numeric preconditions violated at run time (pole hit, degenerate series, ...).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace caplab
