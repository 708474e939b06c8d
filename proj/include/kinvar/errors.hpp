#pragma once

#include <stdexcept>
#include <string>

namespace kinvar {

/// Malformed input: bad network definition, bad scenario, contract violation.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure during a computation (step underflow, negative
/// concentrations, singular decomposition).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace kinvar
