#pragma once

#include <stdexcept>
#include <string>

namespace siws {

/// Invalid model data, scenario files, or violated operation preconditions.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative machinery failed: non-convergence, step-size underflow,
/// domain-guard violations.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace siws
