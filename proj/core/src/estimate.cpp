#include "glmminimax/estimate.hpp"

#include <cmath>
#include <limits>

#include "glmminimax/error.hpp"

namespace glmminimax {

std::string_view to_string(EstimatorKind kind) noexcept {
    switch (kind) {
        case EstimatorKind::linear_mle:
            return "linear_mle";
        case EstimatorKind::irls_mle:
            return "irls_mle";
    }
    return "unknown";
}

EstimatorKind parse_estimator_kind(std::string_view text) {
    if (text == "linear" || text == "linear_mle") {
        return EstimatorKind::linear_mle;
    }
    if (text == "irls" || text == "irls_mle") {
        return EstimatorKind::irls_mle;
    }
    throw PreconditionError("unknown estimator '" + std::string(text) + "' (expected linear or irls)");
}

void EstimatorConfig::validate() const {
    if (max_iters < 1) {
        throw PreconditionError("max_iters must be at least 1");
    }
    if (!(grad_tol > 0.0)) {
        throw PreconditionError("grad_tol must be positive");
    }
    if (!(step_damping > 0.0) || step_damping > 1.0) {
        throw PreconditionError("step_damping must lie in (0, 1]");
    }
    if (max_halvings < 0) {
        throw PreconditionError("max_halvings must be nonnegative");
    }
}

Eigen::VectorXd linear_mle(const DesignSpec& design, double curvature, const Eigen::VectorXd& x,
                           bool allow_rank_deficient) {
    if (!design.full_rank() && !allow_rank_deficient) {
        throw PreconditionError("linear MLE needs a full-rank design");
    }
    if (x.size() != design.rows()) {
        throw PreconditionError("observation length does not match the design");
    }
    if (!(curvature > 0.0)) {
        throw PreconditionError("curvature must be positive");
    }
    const Eigen::Index r = design.rank();
    const Eigen::VectorXd coeffs =
        (design.left_factor().leftCols(r).transpose() * x).cwiseQuotient(design.singular_values().head(r));
    return design.right_factor().leftCols(r) * coeffs / curvature;
}

Eigen::VectorXd project_ball(const Eigen::VectorXd& v) {
    if (!v.allFinite()) {
        throw DomainError("cannot project a non-finite vector onto the unit ball");
    }
    const double norm = v.norm();
    return norm <= 1.0 ? v : Eigen::VectorXd(v / norm);
}

namespace {

struct Curvatures {
    Eigen::VectorXd mean;
    Eigen::VectorXd weight;
};

Curvatures evaluate(const GlmFamily& family, const Eigen::VectorXd& eta) {
    Curvatures c{Eigen::VectorXd(eta.size()), Eigen::VectorXd(eta.size())};
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        c.mean(i) = family.cumulant_d1(eta(i));
        c.weight(i) = family.cumulant_d2(eta(i));
    }
    return c;
}

double objective(const GlmFamily& family, const Eigen::VectorXd& eta, const Eigen::VectorXd& x) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        total += x(i) * eta(i) - family.cumulant(eta(i));
    }
    return total;
}

// Newton direction H^{-1} g. Nonsingular H goes through LDLT; a singular or
// indefinite H gets a growing ridge (or the minimum-norm solve when the
// design is allowed to be rank deficient).
bool newton_direction(const Eigen::MatrixXd& hessian, const Eigen::VectorXd& gradient, bool min_norm,
                      Eigen::VectorXd& direction) {
    const Eigen::Index d = hessian.rows();
    if (min_norm) {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(hessian);
        cod.setThreshold(1e-12);
        direction = cod.solve(gradient);
        return direction.allFinite();
    }
    const double diag_scale = std::max(hessian.diagonal().cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hessian);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive() &&
        ldlt.vectorD().minCoeff() > 1e-13 * diag_scale) {
        direction = ldlt.solve(gradient);
        if (direction.allFinite()) {
            return true;
        }
    }
    double ridge = 1e-10 * diag_scale;
    for (int attempt = 0; attempt < 12; ++attempt, ridge *= 100.0) {
        const Eigen::MatrixXd damped = hessian + ridge * Eigen::MatrixXd::Identity(d, d);
        Eigen::LDLT<Eigen::MatrixXd> retry(damped);
        if (retry.info() == Eigen::Success && retry.isPositive()) {
            direction = retry.solve(gradient);
            if (direction.allFinite()) {
                return true;
            }
        }
    }
    return false;
}

}  // namespace

IrlsResult irls_fit(const GlmModel& model, const Eigen::VectorXd& x, const EstimatorConfig& config) {
    config.validate();
    const DesignSpec& design = model.design();
    if (!design.full_rank() && !config.allow_rank_deficient) {
        throw PreconditionError("IRLS needs a full-rank design");
    }
    if (x.size() != design.rows() || !x.allFinite()) {
        throw PreconditionError("observation must be finite with one entry per design row");
    }
    const GlmFamily& family = model.family();
    const Eigen::MatrixXd& m = design.entries();
    const double tol = config.grad_tol * (1.0 + x.norm());

    IrlsResult result;
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(design.cols());
    Eigen::VectorXd eta = m * theta;
    double loglik = objective(family, eta, x);
    if (!std::isfinite(loglik)) {
        throw EstimatorError("log-likelihood is not finite at the starting point");
    }
    result.log_likelihoods.push_back(loglik / family.scale());

    for (int iter = 0; iter < config.max_iters; ++iter) {
        const Curvatures c = evaluate(family, eta);
        const Eigen::VectorXd gradient = m.transpose() * (x - c.mean);
        result.score_norm = gradient.norm();
        if (result.score_norm <= tol) {
            result.converged = true;
            break;
        }
        const Eigen::MatrixXd hessian = m.transpose() * c.weight.asDiagonal() * m;
        Eigen::VectorXd direction;
        if (!newton_direction(hessian, gradient, config.allow_rank_deficient, direction)) {
            break;
        }

        // Near the optimum the predicted ascent g^T H^{-1} g drops below the
        // resolution of the objective and the line search cannot tell steps
        // apart; the undamped Newton step is then taken as is.
        const double predicted = gradient.dot(direction);
        const double resolution = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(loglik));
        bool accepted = false;
        if (std::isfinite(predicted) && predicted >= 0.0 && predicted <= resolution) {
            const Eigen::VectorXd candidate = theta + direction;
            const Eigen::VectorXd candidate_eta = m * candidate;
            const double candidate_loglik = objective(family, candidate_eta, x);
            if (std::isfinite(candidate_loglik) && candidate_loglik >= loglik - resolution) {
                theta = candidate;
                eta = candidate_eta;
                loglik = std::max(loglik, candidate_loglik);
                ++result.iterations;
                result.log_likelihoods.push_back(loglik / family.scale());
                continue;
            }
        }
        double step = config.step_damping;
        for (int h = 0; h <= config.max_halvings; ++h, step *= 0.5) {
            const Eigen::VectorXd candidate = theta + step * direction;
            const Eigen::VectorXd candidate_eta = m * candidate;
            const double candidate_loglik = objective(family, candidate_eta, x);
            if (std::isfinite(candidate_loglik) && candidate_loglik >= loglik) {
                theta = candidate;
                eta = candidate_eta;
                loglik = candidate_loglik;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // No representable step improves the objective.
            result.converged = std::isfinite(predicted) && predicted <= resolution;
            break;
        }
        ++result.iterations;
        result.log_likelihoods.push_back(loglik / family.scale());
    }
    if (!result.converged) {
        const Curvatures c = evaluate(family, eta);
        result.score_norm = (m.transpose() * (x - c.mean)).norm();
        result.converged = result.score_norm <= tol;
    }

    if (!theta.allFinite()) {
        throw EstimatorError("IRLS produced a non-finite iterate");
    }
    result.unprojected = theta;
    if (config.project_to_ball) {
        result.theta = project_ball(theta);
    } else if (!result.converged) {
        throw EstimatorError("IRLS did not converge within max_iters (score norm " +
                             std::to_string(result.score_norm) + ")");
    } else {
        result.theta = theta;
    }
    return result;
}

Eigen::VectorXd irls_mle(const GlmModel& model, const Eigen::VectorXd& x, const EstimatorConfig& config) {
    return irls_fit(model, x, config).theta;
}

Eigen::VectorXd estimate(const GlmModel& model, const Eigen::VectorXd& x, const EstimatorConfig& config) {
    switch (config.kind) {
        case EstimatorKind::linear_mle: {
            if (model.family().kind() != FamilyKind::gaussian) {
                throw PreconditionError("the linear MLE applies to Gaussian families only; use irls");
            }
            Eigen::VectorXd theta =
                linear_mle(model.design(), model.family().curvature_bound(), x, config.allow_rank_deficient);
            return config.project_to_ball ? project_ball(theta) : theta;
        }
        case EstimatorKind::irls_mle:
            return irls_mle(model, x, config);
    }
    throw PreconditionError("unknown estimator kind");
}

EstimatorConfig default_estimator(const GlmFamily& family) {
    EstimatorConfig config;
    if (family.kind() == FamilyKind::gaussian) {
        config.kind = EstimatorKind::linear_mle;
    } else {
        config.kind = EstimatorKind::irls_mle;
        config.project_to_ball = true;
    }
    return config;
}

}  // namespace glmminimax
