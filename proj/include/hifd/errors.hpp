#pragma once

#include <stdexcept>
#include <string>

namespace hifd {

/// Parameter outside its physical domain (negative inductance, zero divider, ...).
class InvalidParameterError : public std::runtime_error {
public:
    explicit InvalidParameterError(const std::string& what) : std::runtime_error(what) {}
};

/// Bad stream/file configuration (rates that do not divide, malformed scenario, ...).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Integrator state left the trust region; parameters are inconsistent.
class InstabilityError : public std::runtime_error {
public:
    explicit InstabilityError(const std::string& what) : std::runtime_error(what) {}
};

/// Resistance sweep could not reach the requested fault magnitude.
class CalibrationError : public std::runtime_error {
public:
    explicit CalibrationError(const std::string& what) : std::runtime_error(what) {}
};

/// Not enough samples for the requested statistical operation.
class InsufficientDataError : public std::runtime_error {
public:
    explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hifd
