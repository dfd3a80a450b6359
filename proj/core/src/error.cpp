#include "glmminimax/error.hpp"

namespace glmminimax {

namespace {

std::string located(std::size_t row, std::size_t column, const std::string& message) {
    std::string out = "row " + std::to_string(row);
    if (column != 0) {
        out += ", column " + std::to_string(column);
    }
    return out + ": " + message;
}

}  // namespace

ParseError::ParseError(std::size_t row, std::size_t column, const std::string& message)
    : std::runtime_error(located(row, column, message)), row_(row), column_(column) {}

ConvergenceError::ConvergenceError(const std::string& message, double achieved_rtol)
    : std::runtime_error(message + " (achieved relative tolerance " +
                         std::to_string(achieved_rtol) + ")"),
      achieved_rtol_(achieved_rtol) {}

}  // namespace glmminimax
