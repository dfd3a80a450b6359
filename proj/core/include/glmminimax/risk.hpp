#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "glmminimax/bound.hpp"
#include "glmminimax/design.hpp"
#include "glmminimax/estimate.hpp"
#include "glmminimax/family.hpp"

namespace glmminimax {

/// Monte Carlo estimate of E||theta - theta_hat||^2.
struct RiskEstimate {
    double mean_sq_error = 0.0;
    /// 1.96 * sample standard deviation / sqrt(successful trials).
    double half_width = 0.0;
    std::size_t trials = 0;
    std::size_t failures = 0;
    std::uint64_t seed = 0;
    /// Raw moments of the squared error over successful trials.
    double first_moment = 0.0;
    double second_moment = 0.0;
    std::optional<Eigen::VectorXd> theta_at_max;

    std::size_t successes() const noexcept { return trials - failures; }
    /// Half-width recomputed from the stored moments.
    double recomputed_half_width() const;
};

struct MonteCarloOptions {
    std::size_t trials = 100000;
    std::uint64_t seed = 0;
    /// 0 picks GLMMINIMAX_THREADS or the hardware concurrency.
    unsigned threads = 0;
    double max_failure_fraction = 0.01;
};

/// Any measurable function of the observation.
using Estimator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

Estimator make_estimator(const GlmModel& model, const EstimatorConfig& config);

/// Effective worker count: the request if nonzero, else the environment
/// variable GLMMINIMAX_THREADS, else hardware concurrency.
unsigned resolve_thread_count(unsigned requested);

/// Reduces per-trial squared errors (NaN marks a failed trial) in index
/// order. EstimatorError when failures exceed the allowed fraction.
RiskEstimate summarize_errors(const std::vector<double>& squared_errors, std::uint64_t seed,
                              double max_failure_fraction);

/// Risk at a fixed theta. Trial i draws X from Substream(seed, i).
RiskEstimate risk_at(const GlmModel& model, const Eigen::VectorXd& theta, const EstimatorConfig& config,
                     const MonteCarloOptions& options);
RiskEstimate risk_at(const GlmModel& model, const Eigen::VectorXd& theta, const Estimator& estimator,
                     const MonteCarloOptions& options);

struct SearchBudget {
    std::size_t random_points = 0;
};

/// 0, +-e_i, +-v_i (right singular vectors), then `random_points` uniform
/// points on the unit sphere derived from the seed.
std::vector<Eigen::VectorXd> worst_case_candidates(const GlmModel& model, const SearchBudget& budget,
                                                   std::uint64_t seed);

/// Largest risk_at over worst_case_candidates, all evaluated with the same
/// seed (common random numbers). A lower bound on the supremum over the ball.
RiskEstimate worst_case_risk(const GlmModel& model, const EstimatorConfig& config, const SearchBudget& budget,
                             const MonteCarloOptions& options);
RiskEstimate worst_case_risk(const GlmModel& model, const Estimator& estimator, const SearchBudget& budget,
                             const MonteCarloOptions& options);

/// Trial i draws theta from the prior, then X given theta, from one
/// Substream(seed, i).
RiskEstimate bayes_risk(const GlmModel& model, const BoxPrior& prior, const EstimatorConfig& config,
                        const MonteCarloOptions& options);
RiskEstimate bayes_risk(const GlmModel& model, const BoxPrior& prior, const Estimator& estimator,
                        const MonteCarloOptions& options);

struct FavorabilityRow {
    std::string family;
    double curvature = 0.0;
    double scale = 0.0;
    double bound_value = 0.0;
    double bayes_bound = 0.0;
    RiskEstimate bayes;
    RiskEstimate worst;
    /// (s / L) Tr((M^T M)^{-1}) for the Gaussian model with the same L and s.
    double gaussian_closed_form = 0.0;
    /// Linear-MLE risk of that Gaussian model (+inf for rank-deficient designs).
    double gaussian_empirical = 0.0;
    /// gaussian_empirical / bound_value.
    double achievability_ratio = 0.0;

    /// Both empirical risks, widened by their half-widths, clear their bounds.
    bool sound() const;
};

/// One row per family comparing the lower bounds with empirical risks and the
/// matching Gaussian linear model. `configs` is either empty (defaults per
/// family) or one config per family.
std::vector<FavorabilityRow> favorability_report(const DesignSpec& design, std::span<const GlmFamily> families,
                                                 std::span<const EstimatorConfig> configs,
                                                 const MonteCarloOptions& options, const SearchBudget& budget,
                                                 double constant = default_constant());

}  // namespace glmminimax
