#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "glmminimax/design.hpp"
#include "glmminimax/family.hpp"

namespace glmminimax {

enum class EstimatorKind { linear_mle, irls_mle };

std::string_view to_string(EstimatorKind kind) noexcept;
/// Accepts "linear", "linear_mle", "irls", "irls_mle".
EstimatorKind parse_estimator_kind(std::string_view text);

struct EstimatorConfig {
    EstimatorKind kind = EstimatorKind::linear_mle;
    int max_iters = 100;
    double grad_tol = 1e-8;
    /// Initial step length tried by the backtracking line search.
    double step_damping = 1.0;
    int max_halvings = 30;
    bool project_to_ball = false;
    /// Use minimum-norm (pseudoinverse) solves instead of rejecting a
    /// rank-deficient design.
    bool allow_rank_deficient = false;

    void validate() const;
};

/// L^{-1} (M^T M)^{-1} M^T x through the SVD pseudoinverse. PreconditionError
/// on a rank-deficient design unless allow_rank_deficient, in which case the
/// minimum-norm solution is returned.
Eigen::VectorXd linear_mle(const DesignSpec& design, double curvature, const Eigen::VectorXd& x,
                           bool allow_rank_deficient = false);

struct IrlsResult {
    Eigen::VectorXd theta;  ///< after the optional ball projection
    Eigen::VectorXd unprojected;
    int iterations = 0;  ///< accepted Newton steps
    bool converged = false;
    /// Log-likelihood (without base measure) at theta = 0 and after each
    /// accepted step.
    std::vector<double> log_likelihoods;
    double score_norm = 0.0;
};

/// Fisher scoring from theta = 0 with a halving line search on the
/// log-likelihood. Stops once ||M^T (x - mu)|| <= grad_tol (1 + ||x||).
/// Throws EstimatorError when the likelihood goes non-finite, or when the
/// iteration does not converge and the result is not projected to the ball.
IrlsResult irls_fit(const GlmModel& model, const Eigen::VectorXd& x, const EstimatorConfig& config);

Eigen::VectorXd irls_mle(const GlmModel& model, const Eigen::VectorXd& x, const EstimatorConfig& config);

/// v if ||v||_2 <= 1, else v / ||v||_2. DomainError for non-finite input.
Eigen::VectorXd project_ball(const Eigen::VectorXd& v);

/// Dispatches on config.kind; linear_mle uses the family's curvature bound
/// and needs a Gaussian family.
Eigen::VectorXd estimate(const GlmModel& model, const Eigen::VectorXd& x, const EstimatorConfig& config);

/// Linear MLE for Gaussian families, projected IRLS otherwise.
EstimatorConfig default_estimator(const GlmFamily& family);

}  // namespace glmminimax
