#include "glmminimax/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include <Eigen/Dense>

#include "glmminimax/error.hpp"

namespace glmminimax {

namespace {

QuadratureRule compute_gauss_legendre(int n) {
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        jacobi(k, k - 1) = b;
        jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        rule.nodes[static_cast<std::size_t>(k)] = eig.eigenvalues()(k);
        const double v0 = eig.eigenvectors()(0, k);
        rule.weights[static_cast<std::size_t>(k)] = 2.0 * v0 * v0;
    }
    // Symmetrize: the exact rule is symmetric about zero.
    for (int k = 0; k < n / 2; ++k) {
        const auto a = static_cast<std::size_t>(k);
        const auto b = static_cast<std::size_t>(n - 1 - k);
        const double x = 0.5 * (rule.nodes[b] - rule.nodes[a]);
        const double w = 0.5 * (rule.weights[a] + rule.weights[b]);
        rule.nodes[a] = -x;
        rule.nodes[b] = x;
        rule.weights[a] = w;
        rule.weights[b] = w;
    }
    if (n % 2 == 1) {
        rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    }
    return rule;
}

}  // namespace

QuadratureRule gauss_legendre(int points) {
    if (points < 1 || points > 512) {
        throw PreconditionError("Gauss-Legendre order must lie in [1, 512]");
    }
    static std::mutex cache_mutex;
    static std::map<int, QuadratureRule> cache;
    std::lock_guard lock(cache_mutex);
    auto it = cache.find(points);
    if (it == cache.end()) {
        it = cache.emplace(points, compute_gauss_legendre(points)).first;
    }
    return it->second;
}

QuadratureRule composite_gauss_legendre(double lo, double hi, int panels, int points) {
    if (!(hi > lo) || panels < 1) {
        throw PreconditionError("composite rule needs lo < hi and at least one panel");
    }
    const QuadratureRule base = gauss_legendre(points);
    QuadratureRule rule;
    rule.nodes.reserve(static_cast<std::size_t>(panels) * base.nodes.size());
    rule.weights.reserve(rule.nodes.capacity());
    const double width = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
        const double left = lo + width * p;
        const double mid = left + 0.5 * width;
        for (std::size_t k = 0; k < base.nodes.size(); ++k) {
            rule.nodes.push_back(mid + 0.5 * width * base.nodes[k]);
            rule.weights.push_back(0.5 * width * base.weights[k]);
        }
    }
    return rule;
}

}  // namespace glmminimax
