#include "glmminimax/family.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "glmminimax/error.hpp"
#include "glmminimax/text_io.hpp"

namespace glmminimax {

namespace {

double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double sigmoid(double t) {
    if (t >= 0.0) {
        return 1.0 / (1.0 + std::exp(-t));
    }
    const double e = std::exp(t);
    return e / (1.0 + e);
}

// Inverse CDF of Poisson(rate). Small rates search upward from zero; larger
// rates start at the mode with the exact CDF there and walk either way.
double poisson_quantile(double rate, double u) {
    if (rate < 30.0) {
        double k = 0.0;
        double pmf = std::exp(-rate);
        double cdf = pmf;
        const double cap = rate + 40.0 * std::sqrt(rate) + 100.0;
        while (u > cdf && k < cap) {
            k += 1.0;
            pmf *= rate / k;
            cdf += pmf;
        }
        return k;
    }
    double k = std::floor(rate);
    double cdf = boost::math::gamma_q(k + 1.0, rate);
    double pmf = std::exp(k * std::log(rate) - rate - std::lgamma(k + 1.0));
    if (u <= cdf) {
        while (k > 0.0 && u <= cdf - pmf) {
            cdf -= pmf;
            pmf *= k / rate;
            k -= 1.0;
        }
        return k;
    }
    const double cap = rate + 40.0 * std::sqrt(rate) + 100.0;
    while (u > cdf && k < cap) {
        k += 1.0;
        pmf *= rate / k;
        cdf += pmf;
    }
    return k;
}

double parse_positive(std::string_view text, std::string_view what) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
        throw PreconditionError("invalid " + std::string(what) + ": '" + std::string(text) + "'");
    }
    if (!(value > 0.0)) {
        throw PreconditionError(std::string(what) + " must be positive, got " + std::string(text));
    }
    return value;
}

}  // namespace

GlmFamily::GlmFamily(FamilyKind kind, double curvature, double scale, Interval range)
    : kind_(kind), curvature_bound_(curvature), scale_(scale), range_(range) {}

GlmFamily GlmFamily::gaussian(double curvature, double scale) {
    if (!(curvature > 0.0) || !std::isfinite(curvature)) {
        throw PreconditionError("gaussian curvature L must be positive and finite");
    }
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw PreconditionError("scale must be positive and finite");
    }
    return GlmFamily(FamilyKind::gaussian, curvature, scale, Interval{});
}

GlmFamily GlmFamily::bernoulli() { return GlmFamily(FamilyKind::bernoulli, 0.25, 1.0, Interval{}); }

GlmFamily GlmFamily::poisson(double design_radius) {
    if (!(design_radius > 0.0) || !std::isfinite(design_radius)) {
        throw PreconditionError("design radius must be positive and finite");
    }
    return GlmFamily(FamilyKind::poisson, std::exp(design_radius), 1.0,
                     Interval{-design_radius, design_radius});
}

std::string GlmFamily::name() const {
    switch (kind_) {
        case FamilyKind::gaussian:
            return "gaussian:L=" + format_real(curvature_bound_);
        case FamilyKind::bernoulli:
            return "bernoulli";
        case FamilyKind::poisson:
            return "poisson";
    }
    return "unknown";
}

double GlmFamily::cumulant(double t) const {
    switch (kind_) {
        case FamilyKind::gaussian:
            return 0.5 * curvature_bound_ * t * t;
        case FamilyKind::bernoulli:
            return softplus(t);
        case FamilyKind::poisson:
            return std::exp(t);
    }
    return 0.0;
}

double GlmFamily::cumulant_d1(double t) const {
    switch (kind_) {
        case FamilyKind::gaussian:
            return curvature_bound_ * t;
        case FamilyKind::bernoulli:
            return sigmoid(t);
        case FamilyKind::poisson:
            return std::exp(t);
    }
    return 0.0;
}

double GlmFamily::cumulant_d2(double t) const {
    switch (kind_) {
        case FamilyKind::gaussian:
            return curvature_bound_;
        case FamilyKind::bernoulli: {
            return sigmoid(t) * sigmoid(-t);
        }
        case FamilyKind::poisson:
            return std::exp(t);
    }
    return 0.0;
}

double GlmFamily::log_density(double x, double eta) const {
    switch (kind_) {
        case FamilyKind::gaussian: {
            const double variance = scale_ * curvature_bound_;
            const double r = x - curvature_bound_ * eta;
            return -0.5 * r * r / variance - 0.5 * std::log(2.0 * std::numbers::pi * variance);
        }
        case FamilyKind::bernoulli:
            if (x == 0.0 || x == 1.0) {
                return x * eta - softplus(eta);
            }
            return -std::numeric_limits<double>::infinity();
        case FamilyKind::poisson:
            if (x >= 0.0 && x == std::floor(x)) {
                return x * eta - std::exp(eta) - std::lgamma(x + 1.0);
            }
            return -std::numeric_limits<double>::infinity();
    }
    return -std::numeric_limits<double>::infinity();
}

double GlmFamily::draw(double eta, double uniform) const {
    switch (kind_) {
        case FamilyKind::gaussian:
            return curvature_bound_ * eta + std::sqrt(scale_ * curvature_bound_) * normal_quantile(uniform);
        case FamilyKind::bernoulli:
            return uniform <= sigmoid(-eta) ? 0.0 : 1.0;
        case FamilyKind::poisson:
            return poisson_quantile(std::exp(eta), uniform);
    }
    return 0.0;
}

bool GlmFamily::operator==(const GlmFamily& other) const noexcept {
    return kind_ == other.kind_ && curvature_bound_ == other.curvature_bound_ && scale_ == other.scale_ &&
           range_.lower == other.range_.lower && range_.upper == other.range_.upper;
}

double max_curvature_on_grid(const GlmFamily& family, double lo, double hi, int points) {
    if (points < 2 || !(hi >= lo)) {
        throw PreconditionError("curvature grid needs at least two points and lo <= hi");
    }
    double best = 0.0;
    for (int i = 0; i < points; ++i) {
        const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        best = std::max(best, family.cumulant_d2(t));
    }
    return best;
}

GlmFamily make_family(std::string_view name, double scale, double design_radius) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw PreconditionError("scale must be positive and finite");
    }
    if (!(design_radius > 0.0) || !std::isfinite(design_radius)) {
        throw PreconditionError("design radius must be positive and finite");
    }

    GlmFamily family = [&] {
        if (name == "gaussian") {
            return GlmFamily::gaussian(1.0, scale);
        }
        if (name.starts_with("gaussian:")) {
            std::string_view rest = name.substr(9);
            if (!rest.starts_with("L=")) {
                throw PreconditionError("expected gaussian:L=<value>, got '" + std::string(name) + "'");
            }
            return GlmFamily::gaussian(parse_positive(rest.substr(2), "curvature L"), scale);
        }
        if (name == "bernoulli" || name == "poisson") {
            if (scale != 1.0) {
                throw PreconditionError(std::string(name) + " family has scale fixed at 1");
            }
            return name == "bernoulli" ? GlmFamily::bernoulli() : GlmFamily::poisson(design_radius);
        }
        throw PreconditionError("unknown family '" + std::string(name) +
                                "' (expected gaussian:L=<v>, bernoulli or poisson)");
    }();

    const double observed = max_curvature_on_grid(family, -design_radius, design_radius);
    if (observed > family.curvature_bound() * (1.0 + 1e-12)) {
        throw DomainError("curvature bound of " + family.name() + " fails on the design range");
    }
    return family;
}

MeanVariance mean_and_variance(const GlmFamily& family, double eta) {
    if (!family.natural_param_range().contains(eta)) {
        throw DomainError("natural parameter " + format_real(eta) + " outside the certified range of " +
                          family.name());
    }
    return {family.cumulant_d1(eta), family.scale() * family.cumulant_d2(eta)};
}

GlmModel::GlmModel(DesignSpec design, GlmFamily family) : design_(std::move(design)), family_(family) {
    const double rho = design_.radius();
    if (!family_.natural_param_range().contains(Interval{-rho, rho})) {
        throw PreconditionError("family " + family_.name() + " is not certified on [-" + format_real(rho) +
                                ", " + format_real(rho) + "] required by the design");
    }
}

Eigen::VectorXd GlmModel::natural_parameters(const Eigen::VectorXd& theta) const {
    return design_.entries() * theta;
}

void require_in_ball(const Eigen::VectorXd& theta, Eigen::Index dimension, double tol) {
    if (theta.size() != dimension) {
        throw PreconditionError("theta has dimension " + std::to_string(theta.size()) + ", expected " +
                                std::to_string(dimension));
    }
    if (!theta.allFinite() || theta.norm() > 1.0 + tol) {
        throw PreconditionError("theta must lie in the unit ball (norm " + format_real(theta.norm()) + ")");
    }
}

Eigen::VectorXd sample(const GlmModel& model, const Eigen::VectorXd& theta, std::uint64_t seed) {
    Substream stream(seed, 0);
    return sample(model, theta, stream);
}

Eigen::VectorXd sample(const GlmModel& model, const Eigen::VectorXd& theta, Substream& stream) {
    require_in_ball(theta, model.dimension());
    const Eigen::VectorXd eta = model.natural_parameters(theta);
    Eigen::VectorXd x(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        x(i) = model.family().draw(eta(i), stream.uniform());
    }
    return x;
}

Eigen::MatrixXd fisher_information(const GlmModel& model, const Eigen::VectorXd& theta) {
    require_in_ball(theta, model.dimension());
    const Eigen::VectorXd eta = model.natural_parameters(theta);
    Eigen::VectorXd w(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        w(i) = model.family().cumulant_d2(eta(i));
    }
    const Eigen::MatrixXd& m = model.design().entries();
    Eigen::MatrixXd info = m.transpose() * w.asDiagonal() * m / model.family().scale();
    return 0.5 * (info + info.transpose());
}

Eigen::VectorXd score(const GlmModel& model, const Eigen::VectorXd& theta, const Eigen::VectorXd& x) {
    const Eigen::VectorXd eta = model.natural_parameters(theta);
    Eigen::VectorXd residual(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        residual(i) = x(i) - model.family().cumulant_d1(eta(i));
    }
    return model.design().entries().transpose() * residual / model.family().scale();
}

double log_likelihood(const GlmModel& model, const Eigen::VectorXd& theta, const Eigen::VectorXd& x) {
    const Eigen::VectorXd eta = model.natural_parameters(theta);
    double total = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        total += x(i) * eta(i) - model.family().cumulant(eta(i));
    }
    return total / model.family().scale();
}

}  // namespace glmminimax
