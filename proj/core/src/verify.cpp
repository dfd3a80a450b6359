#include "glmminimax/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "glmminimax/bound.hpp"
#include "glmminimax/error.hpp"
#include "glmminimax/quadrature.hpp"
#include "glmminimax/text_io.hpp"

namespace glmminimax {

namespace {

constexpr int kMaxPanels = 1 << 16;
const double kTwoPiE = 2.0 * std::numbers::pi * std::numbers::e;

struct Grid {
    std::vector<double> nodes;
    std::vector<double> weights;
};

int panel_count(double width, double panel_width) {
    if (!std::isfinite(panel_width) || panel_width <= 0.0) {
        return 1;
    }
    const double p = std::ceil(width / panel_width);
    if (p > kMaxPanels) {
        throw ConvergenceError("quadrature grid would exceed " + std::to_string(kMaxPanels) + " panels",
                               std::numeric_limits<double>::infinity());
    }
    return std::max(1, static_cast<int>(p));
}

// Uniform prior on [-eps/2, eps/2] as probability weights.
Grid prior_grid(double eps, double noise_scale, const QuadratureSpec& q) {
    if (eps == 0.0) {
        return {{0.0}, {1.0}};
    }
    const int panels = panel_count(eps, q.panel_scale * noise_scale);
    QuadratureRule rule = composite_gauss_legendre(-0.5 * eps, 0.5 * eps, panels, q.prior_points);
    for (double& w : rule.weights) {
        w /= eps;
    }
    return {std::move(rule.nodes), std::move(rule.weights)};
}

Grid gaussian_observation_grid(double half_spread, double sd, const QuadratureSpec& q) {
    const double reach = half_spread + q.obs_truncation * sd;
    const int panels = panel_count(2.0 * reach, q.panel_scale * sd);
    QuadratureRule rule = composite_gauss_legendre(-reach, reach, panels, q.obs_points);
    return {std::move(rule.nodes), std::move(rule.weights)};
}

Grid poisson_support(double max_rate) {
    Grid g;
    double pmf = std::exp(-max_rate);
    double cumulative = 0.0;
    for (double x = 0.0;; x += 1.0) {
        if (x > 0.0) {
            pmf *= max_rate / x;
        }
        cumulative += pmf;
        g.nodes.push_back(x);
        g.weights.push_back(1.0);
        if (x > max_rate && pmf < 1e-16 * cumulative) {
            break;
        }
        if (x > max_rate + 60.0 * std::sqrt(max_rate) + 200.0) {
            break;
        }
    }
    return g;
}

double relative_change(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12});
}

void require_scalar_channel(const GlmFamily& family, double slope, double eps) {
    if (!std::isfinite(slope)) {
        throw PreconditionError("slope must be finite");
    }
    if (!(eps >= 0.0) || !std::isfinite(eps)) {
        throw PreconditionError("prior length eps must be nonnegative and finite");
    }
    const double reach = std::abs(slope) * eps / 2.0;
    if (!family.natural_param_range().contains(Interval{-reach, reach})) {
        throw DomainError("natural parameters +-" + format_real(reach) + " leave the certified range of " +
                          family.name());
    }
}

double local_noise_scale(const GlmFamily& family, double slope, double eps) {
    const double reach = std::abs(slope) * eps / 2.0;
    const double peak =
        std::max({family.cumulant_d2(-reach), family.cumulant_d2(0.0), family.cumulant_d2(reach)});
    const double info = slope * slope * peak / family.scale();
    return info > 0.0 ? 1.0 / std::sqrt(info) : std::numeric_limits<double>::infinity();
}

Grid observation_grid(const GlmFamily& family, double slope, double eps, const QuadratureSpec& q) {
    const double reach = std::abs(slope) * eps / 2.0;
    switch (family.kind()) {
        case FamilyKind::gaussian: {
            const double L = family.curvature_bound();
            return gaussian_observation_grid(L * reach, std::sqrt(family.scale() * L), q);
        }
        case FamilyKind::bernoulli:
            return {{0.0, 1.0}, {1.0, 1.0}};
        case FamilyKind::poisson:
            return poisson_support(std::exp(reach));
    }
    return {};
}

ScalarChannelSummary scalar_level(const GlmFamily& family, double slope, double eps, const QuadratureSpec& q) {
    const Grid prior = prior_grid(eps, local_noise_scale(family, slope, eps), q);
    const Grid obs = observation_grid(family, slope, eps, q);
    const std::size_t np = prior.nodes.size();

    ScalarChannelSummary s;
    s.prior_variance = eps * eps / 12.0;
    s.prior_nodes = np;
    for (std::size_t j = 0; j < np; ++j) {
        s.prior_mass += prior.weights[j];
        const double eta = slope * prior.nodes[j];
        s.mean_fisher += prior.weights[j] * slope * slope * family.cumulant_d2(eta) / family.scale();
    }

    std::vector<double> log_f(np);
    std::vector<double> log_joint(np);
    std::vector<double> log_w(np);
    for (std::size_t j = 0; j < np; ++j) {
        log_w[j] = std::log(prior.weights[j]);
    }
    for (std::size_t k = 0; k < obs.nodes.size(); ++k) {
        const double x = obs.nodes[k];
        double peak = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < np; ++j) {
            log_f[j] = family.log_density(x, slope * prior.nodes[j]);
            log_joint[j] = log_w[j] + log_f[j];
            peak = std::max(peak, log_joint[j]);
        }
        if (!std::isfinite(peak)) {
            continue;
        }
        double total = 0.0;
        for (std::size_t j = 0; j < np; ++j) {
            total += std::exp(log_joint[j] - peak);
        }
        const double log_marginal = peak + std::log(total);

        double info = 0.0;
        double mean = 0.0;
        for (std::size_t j = 0; j < np; ++j) {
            const double joint = std::exp(log_joint[j]);
            info += joint * (log_f[j] - log_marginal);
            mean += std::exp(log_joint[j] - log_marginal) * prior.nodes[j];
        }
        double var = 0.0;
        for (std::size_t j = 0; j < np; ++j) {
            const double c = prior.nodes[j] - mean;
            var += std::exp(log_joint[j] - log_marginal) * c * c;
        }
        s.mutual_information += obs.weights[k] * info;
        s.mmse += obs.weights[k] * std::exp(log_marginal) * var;
    }
    return s;
}

// Difference of standard normal CDFs Phi(b) - Phi(a), a <= b, without
// cancellation in either tail.
double normal_cdf_difference(double a, double b) {
    const double r = 1.0 / std::numbers::sqrt2;
    if (a >= 0.0) {
        return 0.5 * (std::erfc(a * r) - std::erfc(b * r));
    }
    if (b <= 0.0) {
        return 0.5 * (std::erfc(-b * r) - std::erfc(-a * r));
    }
    return 1.0 - 0.5 * std::erfc(-a * r) - 0.5 * std::erfc(b * r);
}

double binned_level(const GlmFamily& family, double slope, double eps, double bin_width, const QuadratureSpec& q) {
    const double L = family.curvature_bound();
    const double sd = std::sqrt(family.scale() * L);
    const double reach = L * std::abs(slope) * eps / 2.0 + q.obs_truncation * sd;
    const int bins = static_cast<int>(std::ceil(2.0 * reach / bin_width));
    std::vector<double> edges;
    edges.push_back(-std::numeric_limits<double>::infinity());
    for (int b = 0; b <= bins; ++b) {
        edges.push_back(-reach + bin_width * b);
    }
    edges.push_back(std::numeric_limits<double>::infinity());

    const Grid prior = prior_grid(eps, local_noise_scale(family, slope, eps), q);
    const std::size_t np = prior.nodes.size();
    std::vector<double> p(np);
    double info = 0.0;
    for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
        double marginal = 0.0;
        for (std::size_t j = 0; j < np; ++j) {
            const double mean = L * slope * prior.nodes[j];
            p[j] = normal_cdf_difference((edges[b] - mean) / sd, (edges[b + 1] - mean) / sd);
            marginal += prior.weights[j] * p[j];
        }
        if (marginal <= 0.0) {
            continue;
        }
        for (std::size_t j = 0; j < np; ++j) {
            if (p[j] > 0.0) {
                info += prior.weights[j] * p[j] * std::log(p[j] / marginal);
            }
        }
    }
    return info;
}

template <class Level>
auto self_converge(const QuadratureSpec& quad, Level&& level, const char* what) {
    quad.validate();
    QuadratureSpec spec = quad;
    auto previous = level(spec);
    double achieved = std::numeric_limits<double>::infinity();
    for (int r = 1; r <= quad.max_refinements; ++r) {
        spec = spec.refined();
        auto current = level(spec);
        achieved = current.distance(previous);
        if (achieved <= quad.rtol) {
            return std::make_pair(current, std::make_pair(achieved, r));
        }
        previous = std::move(current);
    }
    throw ConvergenceError(std::string(what) + " did not self-converge", achieved);
}

struct ScalarLevel {
    ScalarChannelSummary s;
    double distance(const ScalarLevel& o) const {
        return std::max({relative_change(s.mutual_information, o.s.mutual_information),
                         relative_change(s.mmse, o.s.mmse), relative_change(s.mean_fisher, o.s.mean_fisher)});
    }
};

struct ValueLevel {
    double value;
    double distance(const ValueLevel& o) const { return relative_change(value, o.value); }
};

struct PairLevel {
    std::array<double, 2> values;
    double distance(const PairLevel& o) const {
        return std::max(relative_change(values[0], o.values[0]), relative_change(values[1], o.values[1]));
    }
};

// Fisher information of theta_i for u ~ N(b_i theta_i + b_j theta_j, I_2)
// after integrating theta_j out under its uniform prior.
double marginal_fisher_level(const Eigen::Vector2d& bi, const Eigen::Vector2d& bj, double eps_i, double eps_j,
                             const QuadratureSpec& q) {
    const Grid prior_i = prior_grid(eps_i, 1.0 / bi.norm(), q);
    const Grid prior_j = prior_grid(eps_j, 1.0 / bj.norm(), q);
    const Eigen::Vector2d half = 0.5 * (bi.cwiseAbs() * eps_i + bj.cwiseAbs() * eps_j);

    std::array<Grid, 2> axes;
    for (int k = 0; k < 2; ++k) {
        const double reach = half(k) + q.obs_truncation;
        QuadratureRule rule = composite_gauss_legendre(-reach, reach, panel_count(2.0 * reach, q.panel_scale),
                                                       q.obs_points);
        axes[static_cast<std::size_t>(k)] = {std::move(rule.nodes), std::move(rule.weights)};
    }

    const double norm = 1.0 / (2.0 * std::numbers::pi);
    double total = 0.0;
    for (std::size_t a = 0; a < prior_i.nodes.size(); ++a) {
        const Eigen::Vector2d shift = bi * prior_i.nodes[a];
        double inner = 0.0;
        for (std::size_t k0 = 0; k0 < axes[0].nodes.size(); ++k0) {
            for (std::size_t k1 = 0; k1 < axes[1].nodes.size(); ++k1) {
                const Eigen::Vector2d u(axes[0].nodes[k0], axes[1].nodes[k1]);
                double density = 0.0;
                double derivative = 0.0;
                for (std::size_t b = 0; b < prior_j.nodes.size(); ++b) {
                    const Eigen::Vector2d r = u - shift - bj * prior_j.nodes[b];
                    const double g = prior_j.weights[b] * norm * std::exp(-0.5 * r.squaredNorm());
                    density += g;
                    derivative += g * bi.dot(r);
                }
                if (density > 0.0) {
                    inner += axes[0].weights[k0] * axes[1].weights[k1] * derivative * derivative / density;
                }
            }
        }
        total += prior_i.weights[a] * inner;
    }
    return total;
}

std::string instance_label(const GlmFamily& family, double slope, double eps) {
    return "family=" + family.name() + ";slope=" + format_real(slope) + ";eps=" + format_real(eps) +
           ";scale=" + format_real(family.scale());
}

}  // namespace

void QuadratureSpec::validate() const {
    if (prior_points < 1 || obs_points < 1) {
        throw PreconditionError("quadrature needs at least one node per panel");
    }
    if (!(obs_truncation > 0.0) || !(panel_scale > 0.0) || !(rtol > 0.0)) {
        throw PreconditionError("quadrature truncation, panel scale and tolerance must be positive");
    }
    if (max_refinements < 1) {
        throw PreconditionError("quadrature needs at least one refinement for the convergence check");
    }
}

QuadratureSpec QuadratureSpec::refined() const {
    QuadratureSpec next = *this;
    next.panel_scale *= 0.5;
    return next;
}

ScalarChannelSummary analyze_scalar_channel(const GlmFamily& family, double slope, double eps,
                                            const QuadratureSpec& quad) {
    require_scalar_channel(family, slope, eps);
    auto [level, meta] = self_converge(
        quad, [&](const QuadratureSpec& q) { return ScalarLevel{scalar_level(family, slope, eps, q)}; },
        "scalar channel quadrature");
    level.s.achieved_rtol = meta.first;
    level.s.refinements = meta.second;
    return level.s;
}

double mutual_information_1d(const GlmFamily& family, double slope, double eps, const QuadratureSpec& quad) {
    return analyze_scalar_channel(family, slope, eps, quad).mutual_information;
}

double mutual_information_binned(const GlmFamily& family, double slope, double eps, double bin_width,
                                 const QuadratureSpec& quad) {
    if (family.kind() != FamilyKind::gaussian) {
        throw PreconditionError("binned mutual information is implemented for Gaussian families");
    }
    if (!(bin_width > 0.0)) {
        throw PreconditionError("bin width must be positive");
    }
    require_scalar_channel(family, slope, eps);
    return self_converge(
               quad,
               [&](const QuadratureSpec& q) { return ValueLevel{binned_level(family, slope, eps, bin_width, q)}; },
               "binned mutual information")
        .first.value;
}

std::array<MarginalFisherPair, 2> verify_marginal_fisher(const DesignSpec& design, const GlmFamily& family,
                                                         const Eigen::Vector2d& eps, const QuadratureSpec& quad) {
    if (family.kind() != FamilyKind::gaussian) {
        throw PreconditionError("marginal Fisher verification supports Gaussian families");
    }
    if (design.cols() != 2 || !design.full_rank()) {
        throw PreconditionError("marginal Fisher verification needs a full-rank n x 2 design");
    }
    if (!(eps.array() >= 0.0).all() || eps.squaredNorm() > 4.0) {
        throw PreconditionError("prior lengths must be nonnegative with sum of squares at most 4");
    }
    const GlmModel model(design, family);
    const double L = family.curvature_bound();
    const double s = family.scale();

    // u = C^{-1} M^T X / sqrt(s L) ~ N(sqrt(L/s) C^T theta, I) with G = C C^T.
    const Eigen::Matrix2d gram = design.gram();
    const Eigen::Matrix2d lower = gram.llt().matrixL();
    const Eigen::Matrix2d loadings = std::sqrt(L / s) * lower.transpose();

    std::array<MarginalFisherPair, 2> out{};
    const Grid prior0 = prior_grid(eps(0), std::numeric_limits<double>::infinity(), quad);
    const Grid prior1 = prior_grid(eps(1), std::numeric_limits<double>::infinity(), quad);
    for (std::size_t a = 0; a < prior0.nodes.size(); ++a) {
        for (std::size_t b = 0; b < prior1.nodes.size(); ++b) {
            const Eigen::Vector2d theta(prior0.nodes[a], prior1.nodes[b]);
            const Eigen::MatrixXd info = fisher_information(model, theta);
            const double w = prior0.weights[a] * prior1.weights[b];
            out[0].full_diagonal += w * info(0, 0);
            out[1].full_diagonal += w * info(1, 1);
        }
    }

    const Eigen::Vector2d b0 = loadings.col(0);
    const Eigen::Vector2d b1 = loadings.col(1);
    const auto result = self_converge(
        quad,
        [&](const QuadratureSpec& q) {
            return PairLevel{{marginal_fisher_level(b0, b1, eps(0), eps(1), q),
                              marginal_fisher_level(b1, b0, eps(1), eps(0), q)}};
        },
        "marginal Fisher quadrature");
    out[0].marginal = result.first.values[0];
    out[1].marginal = result.first.values[1];
    return out;
}

bool EntropyChainReport::holds(double tol) const {
    return std::all_of(links.begin(), links.end(), [tol](const ChainLink& l) { return l.slack() >= -tol; });
}

EntropyChainReport verify_entropy_chain(const GlmFamily& family, double slope, double eps,
                                        const QuadratureSpec& quad) {
    EntropyChainReport report;
    report.summary = analyze_scalar_channel(family, slope, eps, quad);
    const ScalarChannelSummary& s = report.summary;

    const double curvature_arg = eps * eps / 12.0 * slope * slope * family.curvature_bound() / family.scale();
    const double phi_fisher = phi(s.prior_variance * s.mean_fisher);
    const double phi_curvature = phi(curvature_arg);
    const double entropy_term = eps * eps * std::exp(-2.0 * s.mutual_information) / kTwoPiE;
    const double final_bound = eps * eps * std::exp(-2.0 * phi_curvature) / kTwoPiE;

    report.links = {
        {"mi_bound", phi_fisher, s.mutual_information},
        {"fisher_bound", phi_curvature, phi_fisher},
        {"entropy_power", entropy_term, final_bound},
        {"mmse_entropy", s.mmse, entropy_term},
        {"mmse_bound", s.mmse, final_bound},
    };
    return report;
}

SuiteKind parse_suite(std::string_view text) {
    if (text == "lemma1" || text == "mi-bound") {
        return SuiteKind::mi_bound;
    }
    if (text == "lemma2" || text == "marginal-fisher") {
        return SuiteKind::marginal_fisher;
    }
    if (text == "chain" || text == "entropy-chain") {
        return SuiteKind::entropy_chain;
    }
    throw PreconditionError("unknown suite '" + std::string(text) + "' (expected lemma1, lemma2 or chain)");
}

GridSize parse_grid(std::string_view text) {
    if (text == "coarse") {
        return GridSize::coarse;
    }
    if (text == "fine") {
        return GridSize::fine;
    }
    throw PreconditionError("unknown grid '" + std::string(text) + "' (expected coarse or fine)");
}

std::string_view to_string(SuiteKind suite) noexcept {
    switch (suite) {
        case SuiteKind::mi_bound:
            return "lemma1";
        case SuiteKind::marginal_fisher:
            return "lemma2";
        case SuiteKind::entropy_chain:
            return "chain";
    }
    return "unknown";
}

std::vector<CheckRow> run_suite(SuiteKind suite, GridSize grid) {
    const bool fine = grid == GridSize::fine;
    const std::string name(to_string(suite));
    std::vector<CheckRow> rows;

    switch (suite) {
        case SuiteKind::mi_bound: {
            const std::vector<double> slopes = fine ? std::vector<double>{0.1, 0.25, 0.5, 0.75, 1, 1.5, 2, 3, 4}
                                                    : std::vector<double>{0.25, 0.5, 1, 2, 4};
            const std::vector<double> lengths = fine ? std::vector<double>{0.05, 0.1, 0.4, 0.8, 1.2, 1.6, 2.0}
                                                     : std::vector<double>{0.1, 0.4, 0.8, 1.4, 2.0};
            const std::vector<double> scales =
                fine ? std::vector<double>{0.1, 0.5, 1, 10} : std::vector<double>{0.1, 1, 10};
            for (const double s : scales) {
                const GlmFamily family = GlmFamily::gaussian(1.0, s);
                for (const double a : slopes) {
                    for (const double e : lengths) {
                        const ScalarChannelSummary sum = analyze_scalar_channel(family, a, e);
                        const double bound = phi(e * e / 12.0 * a * a * family.curvature_bound() / s);
                        rows.push_back({name, "mi_bound", instance_label(family, a, e), bound, sum.mutual_information});
                    }
                }
            }
            for (const double a : {0.5, 1.0, 2.0, 4.0}) {
                for (const double e : {0.5, 1.0, 2.0}) {
                    const GlmFamily bern = GlmFamily::bernoulli();
                    const GlmFamily pois = GlmFamily::poisson(std::max(1.0, a * e / 2.0));
                    for (const GlmFamily& family : {bern, pois}) {
                        const ScalarChannelSummary sum = analyze_scalar_channel(family, a, e);
                        rows.push_back({name, "mi_bound", instance_label(family, a, e),
                                        phi(sum.prior_variance * sum.mean_fisher), sum.mutual_information});
                    }
                }
            }
            break;
        }
        case SuiteKind::marginal_fisher: {
            std::vector<std::pair<std::string, Eigen::MatrixXd>> designs;
            designs.emplace_back("identity", Eigen::MatrixXd::Identity(2, 2));
            Eigen::MatrixXd orthogonal(2, 2);
            orthogonal << 1, 1, 1, -1;
            designs.emplace_back("orthogonal", orthogonal);
            Eigen::MatrixXd correlated(3, 2);
            correlated << 1, 0.5, 0, 1, 0.5, 0.5;
            designs.emplace_back("correlated", correlated);
            if (fine) {
                Eigen::MatrixXd skewed(3, 2);
                skewed << 2, 1.5, 0.2, 0.4, 1, 0.9;
                designs.emplace_back("skewed", skewed);
            }
            std::vector<Eigen::Vector2d> pairs = {{1.0, 1.0}, {1.5, 0.5}, {1.0, 0.0}};
            if (fine) {
                pairs.emplace_back(0.3, 1.8);
                pairs.emplace_back(1.4, 1.4);
            }
            const std::vector<double> scales = fine ? std::vector<double>{0.5, 1.0, 4.0} : std::vector<double>{1.0};
            for (const double s : scales) {
                const GlmFamily family = GlmFamily::gaussian(1.0, s);
                for (const auto& [label, m] : designs) {
                    const DesignSpec design(m);
                    for (const Eigen::Vector2d& eps : pairs) {
                        const auto result = verify_marginal_fisher(design, family, eps);
                        for (int i = 0; i < 2; ++i) {
                            const std::string instance = "design=" + label + ";coord=" + std::to_string(i + 1) +
                                                         ";eps1=" + format_real(eps(0)) + ";eps2=" + format_real(eps(1)) +
                                                         ";scale=" + format_real(s);
                            rows.push_back({name, "marginal_fisher", instance,
                                            result[static_cast<std::size_t>(i)].full_diagonal,
                                            result[static_cast<std::size_t>(i)].marginal});
                        }
                    }
                }
            }
            break;
        }
        case SuiteKind::entropy_chain: {
            const std::vector<double> slopes = {0.25, 0.5, 1, 2, 4};
            const std::vector<double> lengths = fine ? std::vector<double>{0.01, 0.2, 0.5, 1, 1.5, 2}
                                                     : std::vector<double>{0.2, 0.5, 1, 2};
            const std::vector<double> scales = fine ? std::vector<double>{0.1, 1, 10} : std::vector<double>{1};
            for (const double s : scales) {
                const GlmFamily family = GlmFamily::gaussian(1.0, s);
                for (const double a : slopes) {
                    for (const double e : lengths) {
                        const EntropyChainReport report = verify_entropy_chain(family, a, e);
                        for (const ChainLink& link : report.links) {
                            rows.push_back({name, link.name, instance_label(family, a, e), link.larger, link.smaller});
                        }
                    }
                }
            }
            break;
        }
    }
    return rows;
}

}  // namespace glmminimax
