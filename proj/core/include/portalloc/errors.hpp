#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace portalloc {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent user input (instance, scenarios, config).
class InvalidInput : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// CSV/JSON parse failure. `line()` is 1-based, 0 when unknown.
class ParseError : public InvalidInput {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : InvalidInput(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class MissingObservation : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class ParameterOutOfRange : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class DimensionMismatch : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// Production can never reach the lower limit L_t; detected before solving.
class InfeasibleStructure : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// Basis factorization broke down even under Bland's rule.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

/// Solver values disagree with quantities recomputed from the model definition.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// An optimization step returned a status other than Optimal where one was required.
class SolveFailed : public Error {
public:
    using Error::Error;
};

}  // namespace portalloc
