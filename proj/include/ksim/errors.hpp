#pragma once

#include <stdexcept>
#include <string>

namespace ksim {

/// Invalid user-supplied configuration or arguments (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure: NaN states, non-convergent quadrature, factorization
/// breakdown (CLI exit code 3).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Structurally invalid data, e.g. a path that resurrects a cemetery state.
class StructuralError : public std::logic_error {
public:
    explicit StructuralError(const std::string& msg) : std::logic_error(msg) {}
};

} // namespace ksim
