#include "glmminimax/bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "glmminimax/error.hpp"

namespace glmminimax {

namespace {

const double kTwoPiE = 2.0 * std::numbers::pi * std::numbers::e;

void require_valid_constant(double constant) {
    if (!(constant > 0.0) || !std::isfinite(constant)) {
        throw PreconditionError("bound constant must be positive and finite");
    }
}

// Shrinks eps until sum eps_i^2 <= 4 holds in index-order floating point.
void clamp_to_ball(Eigen::VectorXd& eps) {
    while (eps.squaredNorm() > 4.0) {
        eps *= 1.0 - std::numeric_limits<double>::epsilon();
    }
}

BoundReport bound_from_parameters(const DesignSpec& design, double curvature, double scale, double constant) {
    require_valid_constant(constant);
    BoundReport report;
    report.constant = constant;
    report.inputs = BoundInputs{curvature, scale, design.trace_inv_gram(), design.cols(), design.rows()};

    const double trace = design.trace_inv_gram();
    report.raw_min_term = std::isinf(trace) ? 1.0 : std::min(scale / curvature * trace, 1.0);
    report.bound_value = constant * report.raw_min_term;

    const DesignSpec rotated = reparametrize(design);
    report.prior = construct_prior(rotated, curvature, scale);
    report.prior.basis = design.right_factor();
    report.prior_case = report.prior.prior_case;
    return report;
}

}  // namespace

double phi(double x) {
    if (!(x >= 0.0)) {
        throw DomainError("phi is defined for x >= 0");
    }
    return x <= 1.0 ? std::sqrt(x) : 1.0 + 0.5 * std::log(x);
}

double default_constant() { return 1.0 / (std::numbers::pi * std::exp(3.0)); }

std::string_view to_string(PriorCase c) noexcept {
    switch (c) {
        case PriorCase::rank_deficient:
            return "rank_deficient";
        case PriorCase::case1:
            return "case1";
        case PriorCase::case2_bulk:
            return "case2_bulk";
        case PriorCase::case2_single:
            return "case2_single";
        case PriorCase::single_large:
            return "single_large";
    }
    return "unknown";
}

Eigen::VectorXd BoxPrior::draw(Substream& stream) const {
    Eigen::VectorXd u(epsilons.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        u(i) = (stream.uniform() - 0.5) * epsilons(i);
    }
    if (basis.size() == 0) {
        return u;
    }
    return basis * u;
}

double BoundReport::bayes_bound() const { return prior.payoff / kTwoPiE; }

double prior_payoff(const Eigen::VectorXd& epsilons, const Eigen::VectorXd& a) {
    if (epsilons.size() != a.size()) {
        throw PreconditionError("epsilon and curvature sequences differ in length");
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double e2 = epsilons(i) * epsilons(i);
        total += e2 * std::exp(-2.0 * phi(e2 * a(i)));
    }
    return total;
}

BoxPrior allocate_interval_lengths(const Eigen::VectorXd& a) {
    const Eigen::Index d = a.size();
    if (d < 1) {
        throw PreconditionError("curvature sequence must be nonempty");
    }
    if (!(a.array() > 0.0).all() || !a.allFinite()) {
        throw PreconditionError("curvature sequence must be positive and finite");
    }
    if (!(a.array().inverse().sum() > 4.0)) {
        throw PreconditionError("interval allocation needs sum 1/a_i > 4; the uniform allocation applies instead");
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index l, Eigen::Index r) { return a(l) > a(r); });

    BoxPrior prior;
    prior.epsilons = Eigen::VectorXd::Zero(d);
    prior.basis = Eigen::MatrixXd::Identity(d, d);

    const Eigen::Index largest = order.front();
    if (a(largest) <= 0.25) {
        prior.epsilons(largest) = 2.0;
        prior.prior_case = PriorCase::single_large;
    } else {
        // Longest prefix (in sorted order) whose lengths sum to at most 4.
        double prefix = 0.0;
        std::size_t t = 0;
        while (t < order.size()) {
            const double e = std::sqrt(1.0 / a(order[t]));
            if (prefix + e * e > 4.0) {
                break;
            }
            prefix += e * e;
            ++t;
        }
        if (prefix >= 2.0) {
            for (std::size_t k = 0; k < t; ++k) {
                prior.epsilons(order[k]) = std::sqrt(1.0 / a(order[k]));
            }
            prior.prior_case = PriorCase::case2_bulk;
        } else {
            prior.epsilons(order[t]) = 2.0;
            prior.prior_case = PriorCase::case2_single;
        }
    }
    clamp_to_ball(prior.epsilons);
    prior.payoff = prior_payoff(prior.epsilons, a);
    return prior;
}

BoxPrior construct_prior(const DesignSpec& diagonal_design, const GlmFamily& family) {
    return construct_prior(diagonal_design, family.curvature_bound(), family.scale());
}

BoxPrior construct_prior(const DesignSpec& diagonal_design, double curvature, double scale) {
    if (!(curvature > 0.0) || !(scale > 0.0)) {
        throw PreconditionError("curvature and scale must be positive");
    }
    if (!has_diagonal_gram(diagonal_design)) {
        throw PreconditionError("construct_prior needs a diagonal Gram matrix; reparametrize the design first");
    }
    const Eigen::Index d = diagonal_design.cols();
    const Eigen::VectorXd gram_diag = diagonal_design.entries().colwise().squaredNorm().transpose();
    const Eigen::VectorXd a = gram_diag * (curvature / (12.0 * scale));

    if (!diagonal_design.full_rank()) {
        Eigen::Index k = 0;
        gram_diag.minCoeff(&k);
        BoxPrior prior;
        prior.epsilons = Eigen::VectorXd::Zero(d);
        prior.epsilons(k) = 2.0;
        prior.prior_case = PriorCase::rank_deficient;
        prior.payoff = prior_payoff(prior.epsilons, a);
        prior.basis = Eigen::MatrixXd::Identity(d, d);
        return prior;
    }

    if (a.array().inverse().sum() <= 4.0) {
        BoxPrior prior;
        prior.epsilons = a.array().inverse().sqrt().matrix();
        clamp_to_ball(prior.epsilons);
        prior.prior_case = PriorCase::case1;
        prior.payoff = prior_payoff(prior.epsilons, a);
        prior.basis = Eigen::MatrixXd::Identity(d, d);
        return prior;
    }
    return allocate_interval_lengths(a);
}

double bayes_risk_lower_bound(const DesignSpec& diagonal_design, const GlmFamily& family, const BoxPrior& prior) {
    if (!has_diagonal_gram(diagonal_design)) {
        throw PreconditionError("bayes_risk_lower_bound needs a diagonal Gram matrix");
    }
    if (prior.epsilons.size() != diagonal_design.cols()) {
        throw PreconditionError("prior dimension does not match the design");
    }
    if (!(prior.epsilons.array() >= 0.0).all() || prior.sum_squares() > 4.0) {
        throw PreconditionError("prior lengths must be nonnegative with sum of squares at most 4");
    }
    const Eigen::VectorXd gram_diag = diagonal_design.entries().colwise().squaredNorm().transpose();
    const double ratio = family.curvature_bound() / family.scale();
    double total = 0.0;
    for (Eigen::Index i = 0; i < gram_diag.size(); ++i) {
        const double e2 = prior.epsilons(i) * prior.epsilons(i);
        total += e2 * std::exp(-2.0 * phi(e2 / 12.0 * ratio * gram_diag(i)));
    }
    return total / kTwoPiE;
}

BoundReport minimax_lower_bound(const DesignSpec& design, const GlmFamily& family, double constant) {
    const double rho = design.radius();
    if (!family.natural_param_range().contains(Interval{-rho, rho})) {
        throw PreconditionError("family " + family.name() + " is not certified for the design radius");
    }
    return bound_from_parameters(design, family.curvature_bound(), family.scale(), constant);
}

BoundReport heterogeneous_lower_bound(const DesignSpec& design, std::span<const GlmFamily> families,
                                      double constant) {
    if (families.empty()) {
        throw PreconditionError("heterogeneous bound needs at least one family");
    }
    if (static_cast<Eigen::Index>(families.size()) != design.rows()) {
        throw PreconditionError("need one family per design row: got " + std::to_string(families.size()) +
                                " families for " + std::to_string(design.rows()) + " rows");
    }
    const Eigen::VectorXd row_norms = design.entries().rowwise().norm();
    double curvature = 0.0;
    double scale = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < families.size(); ++i) {
        const double r = row_norms(static_cast<Eigen::Index>(i));
        if (!families[i].natural_param_range().contains(Interval{-r, r})) {
            throw PreconditionError("family for row " + std::to_string(i + 1) + " is not certified for that row");
        }
        curvature = std::max(curvature, families[i].curvature_bound());
        scale = std::min(scale, families[i].scale());
    }
    return bound_from_parameters(design, curvature, scale, constant);
}

double eigenvalue_ratio_bound(const DesignSpec& design, const GlmFamily& family, double strong_convexity) {
    if (!design.full_rank()) {
        throw PreconditionError("the eigenvalue-ratio bound needs a full-rank design");
    }
    const double curvature = family.curvature_bound();
    if (!(strong_convexity > 0.0) || strong_convexity > curvature) {
        throw PreconditionError("strong convexity R must satisfy 0 < R <= L");
    }
    const auto& sv = design.singular_values();
    const double lambda_max = sv(0) * sv(0);
    const double lambda_min = sv(sv.size() - 1) * sv(sv.size() - 1);
    const double d = static_cast<double>(design.cols());
    return d * family.scale() * strong_convexity / (curvature * curvature) * lambda_min / (lambda_max * lambda_max);
}

}  // namespace glmminimax
