#pragma once

#include <stdexcept>
#include <string>

namespace specmarket {

/// Bad input: a parameter or argument outside its documented domain.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A well-formed request that cannot produce a result (no Kesten root,
/// too few tail observations, non-finite state during a run, ...).
class DiagnosticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InsufficientTail : public DiagnosticError {
public:
    using DiagnosticError::DiagnosticError;
};

class NoKestenRoot : public DiagnosticError {
public:
    using DiagnosticError::DiagnosticError;
};

} // namespace specmarket
