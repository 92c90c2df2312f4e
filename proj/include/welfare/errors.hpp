#pragma once

#include <stdexcept>
#include <string>

namespace welfare {

/// Invalid input: out-of-domain arguments, NaN, malformed specs. CLI exit status 2.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A named hypothesis or supported-regime boundary was violated. CLI exit status 2.
class PreconditionError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Internal numerical failure (non-convergence, overflow, ill-conditioning). CLI exit status 1.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace welfare
