#pragma once

#include <stdexcept>
#include <string>

namespace mlfa {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite or malformed arguments.
class InvalidInputError : public Error {
public:
    using Error::Error;
};

// Argument outside the mathematical domain of an operation (angles, variances).
class DomainError : public Error {
public:
    using Error::Error;
};

// Matrix expected to be positive definite is not.
class SingularityError : public Error {
public:
    SingularityError(const std::string& what, double smallest_eigenvalue)
        : Error(what), smallest_eigenvalue_(smallest_eigenvalue) {}

    double smallest_eigenvalue() const noexcept { return smallest_eigenvalue_; }

private:
    double smallest_eigenvalue_;
};

// Polynomial with a vanishing leading coefficient.
class DegreeError : public Error {
public:
    using Error::Error;
};

// A solver invariant was violated; indicates a numerical breakdown.
class NumericalError : public Error {
public:
    using Error::Error;
};

// Malformed text input; line is 1-based, 0 when not applicable.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace mlfa
