#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "glmminimax/bound.hpp"
#include "glmminimax/error.hpp"
#include "glmminimax/verify.hpp"

namespace glmminimax {
namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// h(X) - h(X | theta) with the Gaussian-uniform convolution written in closed
// form and the outer integral done by a fine midpoint rule.
double gaussian_mi_oracle(double L, double s, double slope, double eps) {
    const double c = L * std::abs(slope) * eps / 2.0;
    const double sd = std::sqrt(s * L);
    const double lo = -c - 12.0 * sd;
    const int steps = 400000;
    const double w = (2.0 * c + 24.0 * sd) / steps;
    double hx = 0.0;
    for (int k = 0; k < steps; ++k) {
        const double x = lo + (k + 0.5) * w;
        const double p = (normal_cdf((x + c) / sd) - normal_cdf((x - c) / sd)) / (2.0 * c);
        if (p > 0.0) {
            hx -= p * std::log(p) * w;
        }
    }
    return hx - 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * sd * sd);
}

double binary_entropy(double p) {
    return (p <= 0.0 || p >= 1.0) ? 0.0 : -p * std::log(p) - (1 - p) * std::log(1 - p);
}

double bernoulli_mi_oracle(double slope, double eps) {
    const int steps = 200000;
    double mean_p = 0.0;
    double mean_h = 0.0;
    for (int k = 0; k < steps; ++k) {
        const double theta = -eps / 2 + (k + 0.5) * eps / steps;
        const double p = 1.0 / (1.0 + std::exp(-slope * theta));
        mean_p += p / steps;
        mean_h += binary_entropy(p) / steps;
    }
    return binary_entropy(mean_p) - mean_h;
}

// Var(theta) - Var(E[theta | X]) by brute-force double midpoint sums.
double gaussian_mmse_oracle(double L, double s, double slope, double eps) {
    const double c = L * std::abs(slope) * eps / 2.0;
    const double sd = std::sqrt(s * L);
    const int nx = 6000;
    const int nt = 3000;
    const double lo = -c - 10.0 * sd;
    const double wx = (2.0 * c + 20.0 * sd) / nx;
    double explained = 0.0;
    for (int i = 0; i < nx; ++i) {
        const double x = lo + (i + 0.5) * wx;
        double px = 0.0;
        double m1 = 0.0;
        for (int j = 0; j < nt; ++j) {
            const double theta = -eps / 2 + (j + 0.5) * eps / nt;
            const double z = (x - L * slope * theta) / sd;
            const double f = std::exp(-0.5 * z * z) / (sd * std::sqrt(2 * std::numbers::pi)) / nt;
            px += f;
            m1 += f * theta;
        }
        if (px > 0.0) {
            explained += (m1 / px) * (m1 / px) * px * wx;
        }
    }
    return eps * eps / 12.0 - explained;
}

TEST(ScalarChannel, GaussianMatchesEntropyOracle) {
    for (const double slope : {0.5, 2.0}) {
        for (const double eps : {0.4, 1.5}) {
            for (const double s : {0.1, 1.0}) {
                const GlmFamily f = GlmFamily::gaussian(1.0, s);
                const double mi = mutual_information_1d(f, slope, eps);
                EXPECT_NEAR(mi, gaussian_mi_oracle(1.0, s, slope, eps), 1e-6 * std::max(mi, 1e-3))
                    << slope << " " << eps << " " << s;
            }
        }
    }
}

TEST(ScalarChannel, GaussianMmseMatchesOracle) {
    const GlmFamily f = GlmFamily::gaussian(1.0, 0.5);
    const ScalarChannelSummary sum = analyze_scalar_channel(f, 1.5, 1.2);
    EXPECT_NEAR(sum.mmse, gaussian_mmse_oracle(1.0, 0.5, 1.5, 1.2), 1e-6);
    EXPECT_LE(sum.mmse, sum.prior_variance);
}

TEST(ScalarChannel, BernoulliMatchesEntropyOracle) {
    for (const double slope : {1.0, 4.0}) {
        for (const double eps : {0.5, 2.0}) {
            const double mi = mutual_information_1d(GlmFamily::bernoulli(), slope, eps);
            EXPECT_NEAR(mi, bernoulli_mi_oracle(slope, eps), 1e-9);
        }
    }
}

TEST(ScalarChannel, BelowGaussianCapacity) {
    for (const double slope : {0.25, 1.0, 4.0}) {
        for (const double eps : {0.1, 0.8, 2.0}) {
            for (const double s : {0.1, 1.0, 10.0}) {
                const GlmFamily f = GlmFamily::gaussian(1.0, s);
                const double snr = slope * slope * f.curvature_bound() * eps * eps / (12.0 * s);
                EXPECT_LE(mutual_information_1d(f, slope, eps), 0.5 * std::log1p(snr) + 1e-12);
            }
        }
    }
}

TEST(ScalarChannel, DegeneratePriorCarriesNoInformation) {
    EXPECT_LT(mutual_information_1d(GlmFamily::gaussian(1.0, 1.0), 1.0, 1e-3), 1e-6);
    EXPECT_EQ(mutual_information_1d(GlmFamily::gaussian(1.0, 1.0), 1.0, 0.0), 0.0);
}

TEST(ScalarChannel, PriorMassAndConvergence) {
    for (const GlmFamily& f : {GlmFamily::gaussian(1.0, 0.1), GlmFamily::bernoulli(), GlmFamily::poisson(2.0)}) {
        const ScalarChannelSummary sum = analyze_scalar_channel(f, 2.0, 1.8);
        EXPECT_NEAR(sum.prior_mass, 1.0, 1e-12) << f.name();
        EXPECT_LE(sum.achieved_rtol, 1e-6) << f.name();
        EXPECT_GE(sum.mutual_information, 0.0);
        EXPECT_NEAR(sum.prior_variance, 1.8 * 1.8 / 12.0, 1e-15);
    }
}

TEST(ScalarChannel, NonConvergenceReportsAchievedTolerance) {
    QuadratureSpec q;
    q.prior_points = 1;
    q.obs_points = 1;
    q.rtol = 1e-15;
    q.max_refinements = 1;
    try {
        analyze_scalar_channel(GlmFamily::gaussian(1.0, 0.01), 4.0, 2.0, q);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        EXPECT_GT(e.achieved_rtol(), 1e-15);
    }
}

TEST(ScalarChannel, RejectsOutOfRangeParameters) {
    EXPECT_THROW(mutual_information_1d(GlmFamily::poisson(0.5), 2.0, 2.0), DomainError);
    EXPECT_THROW(mutual_information_1d(GlmFamily::gaussian(1.0, 1.0), 1.0, -0.1), PreconditionError);
}

TEST(ScalarChannel, BinningNeverAddsInformation) {
    const GlmFamily f = GlmFamily::gaussian(1.0, 0.2);
    for (const double eps : {0.5, 2.0}) {
        const double full = mutual_information_1d(f, 2.0, eps);
        double previous = 0.0;
        for (const double width : {2.0, 0.5, 0.1}) {
            const double binned = mutual_information_binned(f, 2.0, eps, width);
            EXPECT_LE(binned, full + 1e-8) << width;
            EXPECT_GE(binned, previous - 1e-8) << width;  // a sub-lattice refines the partition
            previous = binned;
        }
    }
    EXPECT_THROW(mutual_information_binned(GlmFamily::bernoulli(), 1.0, 1.0, 0.5), PreconditionError);
}

TEST(MiBound, HoldsOnCoarseGrid) {
    for (const CheckRow& row : run_suite(SuiteKind::mi_bound, GridSize::coarse)) {
        EXPECT_GE(row.slack(), -1e-8) << row.instance;
    }
}

DesignSpec design2(double a, double b, double c, double d) {
    Eigen::MatrixXd m(2, 2);
    m << a, b, c, d;
    return DesignSpec(m);
}

TEST(MarginalFisher, DeterministicSecondCoordinateIsTight) {
    Eigen::MatrixXd m(3, 2);
    m << 1, 0.5, 0, 1, 0.5, 0.5;
    const auto r = verify_marginal_fisher(DesignSpec(m), GlmFamily::gaussian(1.0, 1.0), Eigen::Vector2d(1.0, 0.0));
    EXPECT_NEAR(r[0].full_diagonal, r[0].marginal, 1e-6);
    EXPECT_NEAR(r[0].full_diagonal, 1.25, 1e-12);
}

TEST(MarginalFisher, OrthogonalColumnsGiveEquality) {
    for (const DesignSpec& d : {design2(1, 0, 0, 1), design2(1, 1, 1, -1), design2(2, 0, 0, 0.5)}) {
        const auto r = verify_marginal_fisher(d, GlmFamily::gaussian(1.0, 0.7), Eigen::Vector2d(1.0, 1.0));
        for (const auto& p : r) {
            EXPECT_NEAR(p.full_diagonal, p.marginal, 1e-6 * p.full_diagonal);
        }
    }
}

TEST(MarginalFisher, InteractingColumnsLoseInformation) {
    const auto r =
        verify_marginal_fisher(design2(1, 0.6, 0.2, 1), GlmFamily::gaussian(1.0, 1.0), Eigen::Vector2d(1.2, 1.2));
    for (const auto& p : r) {
        EXPECT_GT(p.full_diagonal - p.marginal, 1e-4);
        EXPECT_GT(p.marginal, 0.0);
    }
}

TEST(MarginalFisher, Preconditions) {
    const GlmFamily g = GlmFamily::gaussian(1.0, 1.0);
    EXPECT_THROW(verify_marginal_fisher(design2(1, 1, 1, 1), g, Eigen::Vector2d(1, 1)), PreconditionError);
    EXPECT_THROW(verify_marginal_fisher(design2(1, 0, 0, 1), GlmFamily::bernoulli(), Eigen::Vector2d(1, 1)),
                 PreconditionError);
    EXPECT_THROW(verify_marginal_fisher(design2(1, 0, 0, 1), g, Eigen::Vector2d(2, 1)), PreconditionError);
}

TEST(EntropyChain, HoldsOnTwentyPairs) {
    const GlmFamily f = GlmFamily::gaussian(1.0, 1.0);
    const double two_pi_e = 2 * std::numbers::pi * std::numbers::e;
    for (const double slope : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        for (const double eps : {0.2, 0.5, 1.0, 2.0}) {
            const EntropyChainReport r = verify_entropy_chain(f, slope, eps);
            EXPECT_TRUE(r.holds()) << slope << " " << eps;
            ASSERT_EQ(r.links.size(), 5u);
            const double floor = eps * eps * std::exp(-2 * phi(eps * eps / 12 * slope * slope)) / two_pi_e;
            EXPECT_GE(r.summary.mmse, floor);
        }
    }
}

TEST(EntropyChain, TinyPriorRatioTendsToOne) {
    const EntropyChainReport r = verify_entropy_chain(GlmFamily::gaussian(1.0, 1.0), 1.0, 1e-3);
    const ChainLink& link = r.links[2];
    ASSERT_EQ(link.name, "entropy_power");
    EXPECT_NEAR(link.larger / link.smaller, 1.0, 1e-3);
}

TEST(Suites, Parsing) {
    EXPECT_EQ(parse_suite("lemma1"), SuiteKind::mi_bound);
    EXPECT_EQ(parse_suite("marginal-fisher"), SuiteKind::marginal_fisher);
    EXPECT_EQ(parse_suite("chain"), SuiteKind::entropy_chain);
    EXPECT_THROW(parse_suite("lemma3"), PreconditionError);
    EXPECT_EQ(parse_grid("fine"), GridSize::fine);
    EXPECT_THROW(parse_grid("huge"), PreconditionError);
}

}  // namespace
}  // namespace glmminimax
