#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace glmminimax::testing {

// Test-side randomness is independent of the library's substreams.
inline Eigen::MatrixXd random_matrix(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> n01;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = n01(gen);
        }
    }
    return m;
}

inline Eigen::MatrixXd random_orthogonal(std::mt19937_64& gen, Eigen::Index d) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(gen, d, d));
    return qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
}

inline double relative_error(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

}  // namespace glmminimax::testing
