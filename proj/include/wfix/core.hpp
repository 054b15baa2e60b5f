#pragma once

#include <stdexcept>
#include <string>

namespace wfix {

/// Scalar used throughout the library (x87 extended precision).
using real = long double;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A point outside the domain of its space (e.g. y <= 0 on the half-plane).
class InvalidPoint : public Error {
public:
    using Error::Error;
};

/// Contraction or schedule parameters outside their admissible range.
class CertificateError : public Error {
public:
    using Error::Error;
};

/// Unknown names, malformed specs, incompatible space/mapping pairs.
class ConfigError : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, real last_residual)
        : Error(what), last_residual_(last_residual) {}

    real last_residual() const noexcept { return last_residual_; }

private:
    real last_residual_;
};

class DegenerateComparison : public Error {
public:
    using Error::Error;
};

}  // namespace wfix
