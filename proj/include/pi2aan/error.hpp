#pragma once

#include <stdexcept>
#include <string>

namespace pi2aan {

/// Thrown when a configuration value violates a structural invariant.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when an argument lies outside the domain of a function.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Mismatched table or grid shapes.
class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

/// Malformed input files (baseline samples, configs, stride logs).
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pi2aan
