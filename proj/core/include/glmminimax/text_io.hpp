#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "glmminimax/design.hpp"

namespace glmminimax {

/// Reads the shared matrix text format: one row per line, comma-separated
/// decimal literals, blank lines and lines starting with '#' ignored.
/// Throws ParseError naming the offending row/column.
Eigen::MatrixXd parse_matrix(std::istream& in);

DesignSpec load_design(std::istream& in, RankPolicy policy = {});
DesignSpec load_design(const std::filesystem::path& path, RankPolicy policy = {});

/// A vector file is a matrix with a single row or a single column.
Eigen::VectorXd load_vector(std::istream& in);
Eigen::VectorXd load_vector(const std::filesystem::path& path);

/// Fixed 12 significant digits, "inf"/"-inf"/"nan" for non-finite values.
std::string format_real(double value);

/// Values joined with the given separator using format_real.
std::string join_reals(const Eigen::VectorXd& values, std::string_view separator);

}  // namespace glmminimax
