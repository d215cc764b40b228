#pragma once

#include <stdexcept>
#include <string>

namespace penning {

/// Invalid argument to a library operation (bad mass, dimension mismatch, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Frequencies that do not confine the particle in the static trap.
class TrapRegimeError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

/// Argument outside the domain where a closed form is defined.
class DomainError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

/// Operation requires a Confined rotating-field configuration.
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Normal-mode construction is ill conditioned (nearly degenerate modes).
class ConditioningError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Finite-difference stencil could not match modes between neighbouring configs.
class StencilError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The phase acquired over the supplied time depends on the occupation numbers.
class NotALoopError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace penning
