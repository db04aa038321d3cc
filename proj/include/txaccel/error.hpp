#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace txaccel {

/// Bad argument to a library call (odd quadrature order, bad fraction, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Configuration that cannot describe a valid run.
class InvalidConfig : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Window or position requested beyond the available sequence history.
class OutOfRange : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Physical problem outside what the solver handles (c >= 1).
class UnsupportedProblem : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Numerical self-check failed (complex eigenvalues, ill-conditioned boundary system, ...).
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, std::string diagnostics)
        : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}

    const std::string& diagnostics() const noexcept { return diagnostics_; }

private:
    std::string diagnostics_;
};

/// Malformed input file contents (dataset CSV, metadata).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Formula text that does not parse. `offset` is the byte position of the problem.
class SyntaxError : public std::runtime_error {
public:
    SyntaxError(const std::string& message, std::size_t offset)
        : std::runtime_error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

}  // namespace txaccel
