#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "glmminimax/design.hpp"
#include "glmminimax/family.hpp"
#include "glmminimax/rng.hpp"

namespace glmminimax {

/// sqrt(x) on [0, 1], 1 + log(x)/2 above. Continuous, nondecreasing, concave.
/// DomainError for negative or NaN input.
double phi(double x);

/// 1 / (pi e^3), the explicit constant that makes the minimax bound a
/// certified inequality.
double default_constant();

/// Which branch of the construction produced a box prior.
enum class PriorCase {
    rank_deficient,  ///< all mass on a null direction of the design
    case1,           ///< every coordinate gets epsilon_i^2 = 1 / a_i
    case2_bulk,      ///< leading coordinates get a_i^{-1/2}, the rest zero
    case2_single,    ///< a single coordinate after the bulk gets length 2
    single_large,    ///< every a_i <= 1/4: the largest one gets length 2
};

std::string_view to_string(PriorCase c) noexcept;

/// Product of Unif(-eps_i / 2, eps_i / 2) in the coordinates of `basis`:
/// theta = basis * u with u_i independent uniforms. With sum eps_i^2 <= 4
/// every draw lies in the unit ball.
struct BoxPrior {
    Eigen::VectorXd epsilons;
    PriorCase prior_case = PriorCase::case1;
    /// sum_i eps_i^2 exp(-2 phi(eps_i^2 a_i)) for the a_i used to build it.
    double payoff = 0.0;
    /// d x d orthogonal; identity unless the prior was built on a rotated design.
    Eigen::MatrixXd basis;

    double sum_squares() const { return epsilons.squaredNorm(); }
    /// Consumes d uniforms.
    Eigen::VectorXd draw(Substream& stream) const;
};

struct BoundInputs {
    double curvature = 0.0;  ///< L
    double scale = 0.0;      ///< s(sigma), or the minimum scale for heterogeneous rows
    double trace_inv_gram = 0.0;
    Eigen::Index dimension = 0;
    Eigen::Index observations = 0;
};

struct BoundReport {
    double bound_value = 0.0;
    double constant = 0.0;
    /// min((s / L) Tr((M^T M)^{-1}), 1); 1 when the design is rank deficient.
    double raw_min_term = 0.0;
    PriorCase prior_case = PriorCase::case1;
    BoxPrior prior;
    BoundInputs inputs;

    /// Certified Bayes-risk lower bound of the witnessing prior.
    double bayes_bound() const;
};

/// sum_i eps_i^2 exp(-2 phi(eps_i^2 a_i)).
double prior_payoff(const Eigen::VectorXd& epsilons, const Eigen::VectorXd& a);

/// constant * min((s / L) Tr((M^T M)^{-1}), 1), with the witnessing box prior
/// built on the diagonalized design (prior.basis = right factor of M).
BoundReport minimax_lower_bound(const DesignSpec& design, const GlmFamily& family,
                                double constant = default_constant());

/// Same bound for rows with individual families: L is the largest curvature
/// bound, s is the smallest scale. One family per design row.
BoundReport heterogeneous_lower_bound(const DesignSpec& design, std::span<const GlmFamily> families,
                                      double constant = default_constant());

/// Builds the box prior for a design whose Gram matrix is already diagonal.
/// PreconditionError otherwise.
BoxPrior construct_prior(const DesignSpec& diagonal_design, const GlmFamily& family);
BoxPrior construct_prior(const DesignSpec& diagonal_design, double curvature, double scale);

/// Interval lengths for a positive sequence a with sum 1/a_i > 4 such that
/// sum eps_i^2 <= 4 and payoff >= 2 e^{-2}. Ties in the nonincreasing sort
/// are broken by original index.
BoxPrior allocate_interval_lengths(const Eigen::VectorXd& a);

/// (1 / (2 pi e)) sum_i eps_i^2 exp(-2 phi(eps_i^2 / 12 * L / s * [M^T M]_ii)):
/// a lower bound on the Bayes L2 risk of any estimator under the prior.
/// Requires a diagonal Gram matrix and sum eps_i^2 <= 4.
double bayes_risk_lower_bound(const DesignSpec& diagonal_design, const GlmFamily& family, const BoxPrior& prior);

/// d s R / L^2 * lambda_min(M^T M) / lambda_max(M^T M)^2, the comparison bound
/// obtained from a Kullback-Leibler argument under R <= Phi'' <= L. Needs a
/// full-rank design and 0 < R <= L.
double eigenvalue_ratio_bound(const DesignSpec& design, const GlmFamily& family, double strong_convexity);

}  // namespace glmminimax
