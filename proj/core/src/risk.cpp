#include "glmminimax/risk.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "glmminimax/error.hpp"
#include "glmminimax/rng.hpp"

namespace glmminimax {

namespace {

constexpr double kZ95 = 1.96;
constexpr std::uint64_t kCandidateStream = 0xC4A1D1DA7E5ULL;

void require_trials(const MonteCarloOptions& options) {
    if (options.trials < 100) {
        throw PreconditionError("risk estimation needs at least 100 trials");
    }
    if (!(options.max_failure_fraction >= 0.0) || options.max_failure_fraction >= 1.0) {
        throw PreconditionError("max_failure_fraction must lie in [0, 1)");
    }
}

// Runs body(i) for every i in [0, count). Work is split into contiguous
// blocks; results are written by index, so the outcome is independent of
// the thread count.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(count, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t block = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * block;
        const std::size_t end = std::min(count, begin + block);
        pool.emplace_back([&, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) {
                    body(i);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

double squared_error_or_nan(const Estimator& estimator, const Eigen::VectorXd& x, const Eigen::VectorXd& theta) {
    try {
        const Eigen::VectorXd estimate = estimator(x);
        if (estimate.size() != theta.size() || !estimate.allFinite()) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        return (estimate - theta).squaredNorm();
    } catch (const EstimatorError&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

}  // namespace

double RiskEstimate::recomputed_half_width() const {
    const double n = static_cast<double>(successes());
    if (n < 2.0) {
        return std::numeric_limits<double>::infinity();
    }
    const double variance = std::max(0.0, second_moment - first_moment * first_moment) * n / (n - 1.0);
    return kZ95 * std::sqrt(variance / n);
}

unsigned resolve_thread_count(unsigned requested) {
    if (requested > 0) {
        return requested;
    }
    if (const char* env = std::getenv("GLMMINIMAX_THREADS")) {
        char* end = nullptr;
        const long value = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && value > 0) {
            return static_cast<unsigned>(value);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

RiskEstimate summarize_errors(const std::vector<double>& squared_errors, std::uint64_t seed,
                              double max_failure_fraction) {
    RiskEstimate out;
    out.trials = squared_errors.size();
    out.seed = seed;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const double e : squared_errors) {
        if (std::isnan(e)) {
            ++out.failures;
            continue;
        }
        sum += e;
        sum_sq += e * e;
    }
    if (out.trials == 0 || static_cast<double>(out.failures) > max_failure_fraction * static_cast<double>(out.trials)) {
        throw EstimatorError("estimator failed on " + std::to_string(out.failures) + " of " +
                             std::to_string(out.trials) + " trials");
    }
    const double n = static_cast<double>(out.successes());
    out.first_moment = sum / n;
    out.second_moment = sum_sq / n;
    out.mean_sq_error = out.first_moment;

    // Two-pass variance for the reported half-width.
    double centered = 0.0;
    for (const double e : squared_errors) {
        if (!std::isnan(e)) {
            centered += (e - out.mean_sq_error) * (e - out.mean_sq_error);
        }
    }
    out.half_width = n > 1.0 ? kZ95 * std::sqrt(centered / (n - 1.0) / n) : std::numeric_limits<double>::infinity();
    return out;
}

Estimator make_estimator(const GlmModel& model, const EstimatorConfig& config) {
    config.validate();
    return [&model, config](const Eigen::VectorXd& x) { return estimate(model, x, config); };
}

RiskEstimate risk_at(const GlmModel& model, const Eigen::VectorXd& theta, const EstimatorConfig& config,
                     const MonteCarloOptions& options) {
    return risk_at(model, theta, make_estimator(model, config), options);
}

RiskEstimate risk_at(const GlmModel& model, const Eigen::VectorXd& theta, const Estimator& estimator,
                     const MonteCarloOptions& options) {
    require_trials(options);
    require_in_ball(theta, model.dimension());
    std::vector<double> errors(options.trials);
    parallel_for(options.trials, resolve_thread_count(options.threads), [&](std::size_t i) {
        Substream stream(options.seed, i);
        const Eigen::VectorXd x = sample(model, theta, stream);
        errors[i] = squared_error_or_nan(estimator, x, theta);
    });
    return summarize_errors(errors, options.seed, options.max_failure_fraction);
}

std::vector<Eigen::VectorXd> worst_case_candidates(const GlmModel& model, const SearchBudget& budget,
                                                   std::uint64_t seed) {
    const Eigen::Index d = model.dimension();
    std::vector<Eigen::VectorXd> out;
    out.reserve(static_cast<std::size_t>(1 + 4 * d) + budget.random_points);
    out.push_back(Eigen::VectorXd::Zero(d));
    for (Eigen::Index i = 0; i < d; ++i) {
        const Eigen::VectorXd e = Eigen::VectorXd::Unit(d, i);
        out.push_back(e);
        out.push_back(-e);
    }
    const Eigen::MatrixXd& v = model.design().right_factor();
    for (Eigen::Index i = 0; i < d; ++i) {
        out.push_back(v.col(i));
        out.push_back(-v.col(i));
    }
    Substream stream(seed ^ kCandidateStream, 0);
    for (std::size_t k = 0; k < budget.random_points; ++k) {
        Eigen::VectorXd g(d);
        do {
            for (Eigen::Index i = 0; i < d; ++i) {
                g(i) = stream.normal();
            }
        } while (g.norm() == 0.0);
        out.push_back(g / g.norm());
    }
    return out;
}

RiskEstimate worst_case_risk(const GlmModel& model, const EstimatorConfig& config, const SearchBudget& budget,
                             const MonteCarloOptions& options) {
    return worst_case_risk(model, make_estimator(model, config), budget, options);
}

RiskEstimate worst_case_risk(const GlmModel& model, const Estimator& estimator, const SearchBudget& budget,
                             const MonteCarloOptions& options) {
    if (budget.random_points < static_cast<std::size_t>(model.dimension())) {
        throw PreconditionError("worst-case search budget must be at least the dimension");
    }
    std::optional<RiskEstimate> best;
    for (const Eigen::VectorXd& theta : worst_case_candidates(model, budget, options.seed)) {
        RiskEstimate r = risk_at(model, theta, estimator, options);
        if (!best || r.mean_sq_error > best->mean_sq_error) {
            r.theta_at_max = theta;
            best = std::move(r);
        }
    }
    return *best;
}

RiskEstimate bayes_risk(const GlmModel& model, const BoxPrior& prior, const EstimatorConfig& config,
                        const MonteCarloOptions& options) {
    return bayes_risk(model, prior, make_estimator(model, config), options);
}

RiskEstimate bayes_risk(const GlmModel& model, const BoxPrior& prior, const Estimator& estimator,
                        const MonteCarloOptions& options) {
    require_trials(options);
    if (prior.epsilons.size() != model.dimension()) {
        throw PreconditionError("prior dimension does not match the model");
    }
    if (prior.sum_squares() > 4.0 * (1.0 + 1e-12)) {
        throw PreconditionError("prior must satisfy sum eps_i^2 <= 4");
    }
    std::vector<double> errors(options.trials);
    parallel_for(options.trials, resolve_thread_count(options.threads), [&](std::size_t i) {
        Substream stream(options.seed, i);
        const Eigen::VectorXd theta = prior.draw(stream);
        const Eigen::VectorXd x = sample(model, theta, stream);
        errors[i] = squared_error_or_nan(estimator, x, theta);
    });
    return summarize_errors(errors, options.seed, options.max_failure_fraction);
}

bool FavorabilityRow::sound() const {
    return worst.mean_sq_error + worst.half_width >= bound_value &&
           bayes.mean_sq_error + bayes.half_width >= bayes_bound;
}

std::vector<FavorabilityRow> favorability_report(const DesignSpec& design, std::span<const GlmFamily> families,
                                                 std::span<const EstimatorConfig> configs,
                                                 const MonteCarloOptions& options, const SearchBudget& budget,
                                                 double constant) {
    if (families.empty()) {
        throw PreconditionError("favorability report needs at least one family");
    }
    if (!configs.empty() && configs.size() != families.size()) {
        throw PreconditionError("need one estimator config per family");
    }
    std::vector<FavorabilityRow> rows;
    rows.reserve(families.size());
    for (std::size_t k = 0; k < families.size(); ++k) {
        const GlmFamily& family = families[k];
        EstimatorConfig config = configs.empty() ? default_estimator(family) : configs[k];
        if (!design.full_rank()) {
            config.allow_rank_deficient = true;
        }
        const GlmModel model(design, family);
        const BoundReport report = minimax_lower_bound(design, family, constant);

        FavorabilityRow row;
        row.family = family.name();
        row.curvature = family.curvature_bound();
        row.scale = family.scale();
        row.bound_value = report.bound_value;
        row.bayes_bound = report.bayes_bound();
        row.bayes = bayes_risk(model, report.prior, config, options);
        row.worst = worst_case_risk(model, config, budget, options);
        row.gaussian_closed_form = family.scale() / family.curvature_bound() * design.trace_inv_gram();
        if (design.full_rank()) {
            const GlmModel reference(design, GlmFamily::gaussian(family.curvature_bound(), family.scale()));
            EstimatorConfig linear;
            linear.kind = EstimatorKind::linear_mle;
            row.gaussian_empirical =
                risk_at(reference, Eigen::VectorXd::Zero(design.cols()), linear, options).mean_sq_error;
        } else {
            row.gaussian_empirical = std::numeric_limits<double>::infinity();
        }
        row.achievability_ratio = row.gaussian_empirical / row.bound_value;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace glmminimax
