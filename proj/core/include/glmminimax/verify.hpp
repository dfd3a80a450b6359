#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "glmminimax/design.hpp"
#include "glmminimax/family.hpp"

namespace glmminimax {

/// Quadrature resolution for the scalar and two-parameter channels.
///
/// The prior interval is split into panels no wider than panel_scale times
/// the local noise scale 1 / sqrt(Fisher information); each panel carries a
/// prior_points Gauss-Legendre rule. Gaussian observations are integrated
/// over panels one noise standard deviation wide (times panel_scale) with
/// obs_points nodes each, truncated obs_truncation deviations beyond the
/// extreme means. Bernoulli outcomes are summed exactly; Poisson sums stop
/// once a term past the largest mean drops below 1e-16 of the running sum.
///
/// Results are accepted once halving panel_scale changes every reported
/// quantity by less than rtol (relative, with an absolute floor at 1e-12).
struct QuadratureSpec {
    int prior_points = 8;
    int obs_points = 8;
    double obs_truncation = 8.0;
    double panel_scale = 1.0;
    double rtol = 1e-6;
    int max_refinements = 6;

    void validate() const;
    QuadratureSpec refined() const;
};

struct ScalarChannelSummary {
    double mutual_information = 0.0;  ///< I(X; theta), nats
    double mean_fisher = 0.0;         ///< E I_X(theta) under the prior
    double mmse = 0.0;                ///< Bayes risk of the posterior mean
    double prior_variance = 0.0;      ///< eps^2 / 12
    double prior_mass = 0.0;          ///< sum of discretized prior weights
    std::size_t prior_nodes = 0;
    double achieved_rtol = 0.0;
    int refinements = 0;
};

/// X ~ family with natural parameter slope * theta, theta ~ Unif(-eps/2, eps/2).
/// ConvergenceError if the self-convergence check fails.
ScalarChannelSummary analyze_scalar_channel(const GlmFamily& family, double slope, double eps,
                                            const QuadratureSpec& quad = {});

/// I(X; theta) = E_theta KL(f(.; theta) || marginal) for the scalar channel.
double mutual_information_1d(const GlmFamily& family, double slope, double eps, const QuadratureSpec& quad = {});

/// Same channel with a Gaussian observation reduced to the index of its bin
/// of the given width. Gaussian families only.
double mutual_information_binned(const GlmFamily& family, double slope, double eps, double bin_width,
                                 const QuadratureSpec& quad = {});

/// One coordinate of the marginal-Fisher comparison.
struct MarginalFisherPair {
    double full_diagonal = 0.0;  ///< E [I_X(theta)]_ii
    double marginal = 0.0;       ///< E I_X(theta_i), other coordinate integrated out
};

/// Gaussian family, full-rank n x 2 design, theta_i ~ Unif(-eps_i/2, eps_i/2)
/// independent. The marginal density of X given theta_i is evaluated by
/// quadrature over the other coordinate in the whitened sufficient statistic.
std::array<MarginalFisherPair, 2> verify_marginal_fisher(const DesignSpec& design, const GlmFamily& family,
                                                         const Eigen::Vector2d& eps, const QuadratureSpec& quad = {});

/// A single inequality larger >= smaller.
struct ChainLink {
    std::string name;
    double larger = 0.0;
    double smaller = 0.0;

    double slack() const noexcept { return larger - smaller; }
};

struct EntropyChainReport {
    ScalarChannelSummary summary;
    std::vector<ChainLink> links;

    bool holds(double tol = 1e-8) const;
};

/// Evaluates, for the scalar channel, the chain
///   I <= phi(Var E I_X) <= phi(eps^2/12 slope^2 L / s),
///   mmse >= eps^2 e^{-2 I} / (2 pi e) >= eps^2 e^{-2 phi(eps^2/12 slope^2 L / s)} / (2 pi e).
EntropyChainReport verify_entropy_chain(const GlmFamily& family, double slope, double eps,
                                        const QuadratureSpec& quad = {});

enum class SuiteKind { mi_bound, marginal_fisher, entropy_chain };
enum class GridSize { coarse, fine };

/// "lemma1" / "mi-bound", "lemma2" / "marginal-fisher", "chain" / "entropy-chain".
SuiteKind parse_suite(std::string_view text);
GridSize parse_grid(std::string_view text);
std::string_view to_string(SuiteKind suite) noexcept;

struct CheckRow {
    std::string suite;
    std::string check;
    std::string instance;
    double lhs = 0.0;  ///< side that must be the larger one
    double rhs = 0.0;

    double slack() const noexcept { return lhs - rhs; }
};

std::vector<CheckRow> run_suite(SuiteKind suite, GridSize grid);

}  // namespace glmminimax
