#pragma once

#include <stdexcept>
#include <string>

namespace mascyber {

// Bad input: dimension mismatch, unknown agent, malformed scenario field.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A decomposition did not converge or produced non-finite output.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// The grounded Laplacian is not diagonalizable, so eigenbasis-dependent
// quantities are undefined.
class AssumptionError : public std::runtime_error {
public:
    explicit AssumptionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mascyber
