#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ppwg {

// Error categories map onto distinct CLI exit codes (see tools/).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input files (CSV rows, config syntax).
struct ParseError : Error {
    using Error::Error;
};

// Structurally valid input that violates a precondition or domain rule.
struct ValidationError : Error {
    using Error::Error;
};

struct RangeError : ValidationError {
    using ValidationError::ValidationError;
};

struct LookupError : ValidationError {
    using ValidationError::ValidationError;
};

struct DegenerateInputError : ValidationError {
    using ValidationError::ValidationError;
};

// A numerical procedure failed (no root, no convergence, rejected fit).
struct NumericalError : Error {
    using Error::Error;
};

struct NotPhaseMatchedError : NumericalError {
    using NumericalError::NumericalError;
};

struct UnderdeterminedError : NumericalError {
    UnderdeterminedError(const std::string& msg, std::vector<std::string> unresolved)
        : NumericalError(msg), unresolved_parameters(std::move(unresolved)) {}
    std::vector<std::string> unresolved_parameters;
};

}  // namespace ppwg
