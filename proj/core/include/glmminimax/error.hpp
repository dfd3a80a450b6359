#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace glmminimax {

/// Malformed matrix or vector text. Row and column are 1-based; column 0
/// means the problem concerns the whole row.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t row, std::size_t column, const std::string& message);

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Numerical quadrature failed its self-convergence check.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& message, double achieved_rtol);

    double achieved_rtol() const noexcept { return achieved_rtol_; }

private:
    double achieved_rtol_;
};

/// An estimator could not produce a finite estimate for one observation.
class EstimatorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace glmminimax
