#pragma once

#include <vector>

namespace glmminimax {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Golub-Welsch).
QuadratureRule gauss_legendre(int points);

/// `panels` equal panels over [lo, hi], each with a `points`-node
/// Gauss-Legendre rule. Weights sum to hi - lo.
QuadratureRule composite_gauss_legendre(double lo, double hi, int panels, int points);

}  // namespace glmminimax
