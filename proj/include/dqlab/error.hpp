#pragma once

#include <stdexcept>
#include <string>

namespace dqlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad shapes, out-of-range parameters, violated preconditions.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Mathematically undefined request (e.g. a certificate for u0 = 0).
class DomainError : public Error {
public:
    using Error::Error;
};

class IntegrationDiverged : public Error {
public:
    IntegrationDiverged(const std::string& what, double last_valid_time)
        : Error(what), last_valid_time_(last_valid_time) {}

    double last_valid_time() const noexcept { return last_valid_time_; }

private:
    double last_valid_time_;
};

class FitError : public Error {
public:
    using Error::Error;
};

/// Config parse/validation failure. line() is 0 when the error is not tied
/// to a single line (e.g. a missing key).
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace dqlab
