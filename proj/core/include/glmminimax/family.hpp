#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "glmminimax/design.hpp"
#include "glmminimax/rng.hpp"

namespace glmminimax {

enum class FamilyKind { gaussian, bernoulli, poisson };

struct Interval {
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();

    bool contains(double t) const noexcept { return t >= lower && t <= upper; }
    bool contains(const Interval& other) const noexcept {
        return other.lower >= lower && other.upper <= upper;
    }
};

/// One canonical exponential family: density h(x) exp((x eta - Phi(eta)) / s).
///
/// The built-in families are
///   gaussian(L):  Phi(t) = L t^2 / 2, scale s free, X ~ N(L eta, s L);
///   bernoulli:    Phi(t) = log(1 + e^t), s = 1, curvature bound 1/4;
///   poisson:      Phi(t) = e^t, s = 1, curvature bound e^rho certified only
///                 on [-rho, rho] for the design radius rho.
/// The base measure h is fixed by the kind and only surfaces through
/// log_density() and draw().
class GlmFamily {
public:
    static GlmFamily gaussian(double curvature, double scale);
    static GlmFamily bernoulli();
    static GlmFamily poisson(double design_radius);

    FamilyKind kind() const noexcept { return kind_; }
    /// "gaussian:L=<v>", "bernoulli" or "poisson".
    std::string name() const;

    double cumulant(double t) const;
    double cumulant_d1(double t) const;
    double cumulant_d2(double t) const;

    /// Uniform bound L on cumulant_d2 over natural_param_range().
    double curvature_bound() const noexcept { return curvature_bound_; }
    double scale() const noexcept { return scale_; }
    const Interval& natural_param_range() const noexcept { return range_; }

    /// log f(x; eta) including the base measure. Returns -inf outside the
    /// support.
    double log_density(double x, double eta) const;

    /// Inverse-CDF draw of X given eta from one uniform in (0, 1).
    double draw(double eta, double uniform) const;

    bool operator==(const GlmFamily& other) const noexcept;

private:
    GlmFamily(FamilyKind kind, double curvature, double scale, Interval range);

    FamilyKind kind_;
    double curvature_bound_;
    double scale_;
    Interval range_;
};

/// Builds a family from "gaussian:L=<v>" (or "gaussian", L = 1),
/// "bernoulli" or "poisson". Bernoulli and Poisson have scale fixed at 1.
/// The curvature bound is grid-certified on [-design_radius, design_radius].
GlmFamily make_family(std::string_view name, double scale, double design_radius);

/// Largest cumulant_d2 value seen on an evenly spaced grid over [lo, hi].
double max_curvature_on_grid(const GlmFamily& family, double lo, double hi, int points = 10000);

struct MeanVariance {
    double mean;
    double variance;
};

/// (Phi'(eta), s Phi''(eta)); DomainError when eta is outside the certified range.
MeanVariance mean_and_variance(const GlmFamily& family, double eta);

/// A design paired with a family whose certified range covers every
/// natural parameter <m_i, theta> with ||theta||_2 <= 1.
class GlmModel {
public:
    GlmModel(DesignSpec design, GlmFamily family);

    const DesignSpec& design() const noexcept { return design_; }
    const GlmFamily& family() const noexcept { return family_; }

    Eigen::Index observations() const noexcept { return design_.rows(); }
    Eigen::Index dimension() const noexcept { return design_.cols(); }

    Eigen::VectorXd natural_parameters(const Eigen::VectorXd& theta) const;

private:
    DesignSpec design_;
    GlmFamily family_;
};

/// Default slack on ||theta||_2 <= 1.
inline constexpr double kBallTolerance = 1e-9;

/// PreconditionError unless theta has the model dimension and lies in the
/// unit ball up to the tolerance.
void require_in_ball(const Eigen::VectorXd& theta, Eigen::Index dimension, double tol = kBallTolerance);

Eigen::VectorXd sample(const GlmModel& model, const Eigen::VectorXd& theta, std::uint64_t seed);
/// Consumes exactly n uniforms from the stream, one per coordinate.
Eigen::VectorXd sample(const GlmModel& model, const Eigen::VectorXd& theta, Substream& stream);

/// (1/s) M^T diag(Phi''(<m_j, theta>)) M.
Eigen::MatrixXd fisher_information(const GlmModel& model, const Eigen::VectorXd& theta);

/// Gradient of log f(x; theta) in theta: (1/s) M^T (x - Phi'(M theta)).
Eigen::VectorXd score(const GlmModel& model, const Eigen::VectorXd& theta, const Eigen::VectorXd& x);

/// sum_j (x_j eta_j - Phi(eta_j)) / s, i.e. log f without the base measure.
double log_likelihood(const GlmModel& model, const Eigen::VectorXd& theta, const Eigen::VectorXd& x);

}  // namespace glmminimax
