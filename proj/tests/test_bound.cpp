#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "glmminimax/bound.hpp"
#include "glmminimax/error.hpp"
#include "test_support.hpp"

namespace glmminimax {
namespace {

using std::numbers::e;
using std::numbers::pi;

const double kE2 = std::exp(-2.0);

DesignSpec diagonal(std::initializer_list<double> gram_diag) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(gram_diag.size()),
                                              static_cast<Eigen::Index>(gram_diag.size()));
    Eigen::Index i = 0;
    for (const double g : gram_diag) {
        m(i, i) = std::sqrt(g);
        ++i;
    }
    return DesignSpec(m);
}

TEST(Phi, BranchValues) {
    EXPECT_EQ(phi(0.0), 0.0);
    EXPECT_DOUBLE_EQ(phi(1.0), 1.0);
    EXPECT_DOUBLE_EQ(phi(e * e), 2.0);
    EXPECT_DOUBLE_EQ(phi(0.25), 0.5);
    EXPECT_THROW(phi(-1e-3), DomainError);
}

TEST(Phi, MonotoneConcaveBelowSqrt) {
    double prev = phi(0.0);
    for (int k = 1; k <= 4000; ++k) {
        const double x = k * 0.005;
        const double p = phi(x);
        EXPECT_GE(p, prev);
        EXPECT_LE(p, std::sqrt(x) + 1e-15);
        const double h = 0.005;
        if (x > h) {
            EXPECT_LE(phi(x + h) + phi(x - h), 2 * p + 1e-12) << x;
        }
        prev = p;
    }
    EXPECT_NEAR(phi(1.0 - 1e-12), phi(1.0 + 1e-12), 1e-11);
}

TEST(MinimaxBound, IdentityGaussian) {
    const DesignSpec design(Eigen::MatrixXd::Identity(10, 10));
    const BoundReport r = minimax_lower_bound(design, GlmFamily::gaussian(1.0, 0.01));
    EXPECT_NEAR(r.raw_min_term, 0.1, 1e-15);
    EXPECT_NEAR(r.bound_value, 0.1 / (pi * std::pow(e, 3)), 1e-15);
    EXPECT_NEAR(r.bound_value, 1.585e-3, 5e-7);
    EXPECT_EQ(r.prior_case, PriorCase::case1);
    EXPECT_DOUBLE_EQ(r.bound_value, r.constant * r.raw_min_term);
    EXPECT_EQ(r.inputs.dimension, 10);
    EXPECT_EQ(r.inputs.observations, 10);
}

TEST(MinimaxBound, RankDeficientUsesConstant) {
    Eigen::MatrixXd m(3, 2);
    m << 1, 2, 2, 4, -1, -2;
    const BoundReport r = minimax_lower_bound(DesignSpec(m), GlmFamily::gaussian(1.0, 1.0), 0.5);
    EXPECT_EQ(r.raw_min_term, 1.0);
    EXPECT_EQ(r.bound_value, 0.5);
    EXPECT_EQ(r.prior_case, PriorCase::rank_deficient);
    EXPECT_NEAR(r.prior.sum_squares(), 4.0, 1e-12);
}

TEST(MinimaxBound, MonotoneInDesignScale) {
    std::mt19937_64 gen(8);
    const Eigen::MatrixXd m = testing::random_matrix(gen, 6, 3);
    double prev = 2.0;
    for (const double c : {0.1, 0.3, 1.0, 3.0, 10.0}) {
        const DesignSpec design(c * m);
        const double raw =
            minimax_lower_bound(design, make_family("gaussian", 1.0, design.radius())).raw_min_term;
        EXPECT_LE(raw, prev);
        EXPECT_GE(raw, 0.0);
        EXPECT_LE(raw, 1.0);
        prev = raw;
    }
}

TEST(ConstructPrior, CaseOneEqualLengths) {
    const double c = 10.0;
    const double s = 0.5;
    const double L = 2.0;
    Eigen::MatrixXd m = c * Eigen::MatrixXd::Identity(4, 4);
    const BoxPrior p = construct_prior(DesignSpec(m), L, s);
    EXPECT_EQ(p.prior_case, PriorCase::case1);
    for (Eigen::Index i = 0; i < 4; ++i) {
        EXPECT_NEAR(p.epsilons(i) * p.epsilons(i), 12 * s / (L * c * c), 1e-15);
    }
    EXPECT_NEAR(p.sum_squares(), 12 * (s / L) * (4 / (c * c)), 1e-14);
    EXPECT_LE(p.sum_squares(), 4.0);
}

TEST(ConstructPrior, RankDeficientDiagonal) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
    m(0, 0) = 2.0;
    const BoxPrior p = construct_prior(DesignSpec(m), GlmFamily::gaussian(1.0, 1.0));
    EXPECT_EQ(p.prior_case, PriorCase::rank_deficient);
    EXPECT_EQ(p.epsilons(0), 0.0);
    EXPECT_EQ(p.epsilons(1), 2.0);
}

TEST(ConstructPrior, RejectsNonDiagonalGram) {
    Eigen::MatrixXd m(2, 2);
    m << 1, 1, 0, 1;
    EXPECT_THROW(construct_prior(DesignSpec(m), GlmFamily::gaussian(1.0, 1.0)), PreconditionError);
}

TEST(ConstructPrior, CaseTwoDelegatesToAllocation) {
    // a_i = L g_i / (12 s) = (1, 1, 1, 1, 1) needs g_i = 12 with L = s = 1.
    const BoxPrior p = construct_prior(diagonal({12, 12, 12, 12, 12}), 1.0, 1.0);
    const BoxPrior q = allocate_interval_lengths(Eigen::VectorXd::Ones(5));
    EXPECT_EQ(p.prior_case, q.prior_case);
    EXPECT_LT((p.epsilons - q.epsilons).norm(), 1e-15);
}

TEST(Allocation, FiveOnes) {
    const BoxPrior p = allocate_interval_lengths(Eigen::VectorXd::Ones(5));
    EXPECT_EQ(p.prior_case, PriorCase::case2_bulk);
    Eigen::VectorXd expected(5);
    expected << 1, 1, 1, 1, 0;
    EXPECT_LT((p.epsilons - expected).norm(), 1e-15);
    EXPECT_NEAR(p.payoff, 4 * kE2, 1e-12 * 4 * kE2);
    EXPECT_NEAR(prior_payoff(p.epsilons, Eigen::VectorXd::Ones(5)), 4 * kE2, 1e-15);
}

TEST(Allocation, SmallLargestEntry) {
    const BoxPrior p = allocate_interval_lengths(Eigen::Vector2d(0.2, 0.2));
    EXPECT_EQ(p.prior_case, PriorCase::single_large);
    EXPECT_EQ(p.epsilons, Eigen::Vector2d(2.0, 0.0));
    EXPECT_NEAR(p.payoff, 4 * std::exp(-2 * std::sqrt(0.8)), 1e-15);
    EXPECT_NEAR(p.payoff, 0.668606207389, 1e-12);
}

TEST(Allocation, NineFivesAndOneSmall) {
    Eigen::VectorXd a = Eigen::VectorXd::Constant(10, 5.0);
    a(9) = 0.4;
    const BoxPrior p = allocate_interval_lengths(a);
    EXPECT_EQ(p.prior_case, PriorCase::case2_single);
    Eigen::VectorXd expected = Eigen::VectorXd::Zero(10);
    expected(9) = 2.0;
    EXPECT_EQ(p.epsilons, expected);
    EXPECT_NEAR(p.payoff, 2.5 * kE2, 1e-12 * 2.5 * kE2);
}

TEST(Allocation, UnsortedInputRestoresOrder) {
    Eigen::VectorXd a(4);
    a << 0.3, 2.0, 0.1, 1.0;  // sorted: 2, 1, 0.3, 0.1
    const BoxPrior p = allocate_interval_lengths(a);
    // 1/2 + 1 = 1.5, + 3.33 > 4, so t = 2 and the sum is below 2: single at a = 0.3.
    EXPECT_EQ(p.prior_case, PriorCase::case2_single);
    Eigen::VectorXd expected = Eigen::VectorXd::Zero(4);
    expected(0) = 2.0;
    EXPECT_EQ(p.epsilons, expected);
}

TEST(Allocation, RejectsCaseOneInput) {
    EXPECT_THROW(allocate_interval_lengths(Eigen::Vector2d(1.0, 1.0)), PreconditionError);
    EXPECT_THROW(allocate_interval_lengths(Eigen::Vector2d(-1.0, 0.1)), PreconditionError);
}

TEST(Allocation, RandomSequencesMeetGuarantee) {
    std::mt19937_64 gen(1234);
    std::uniform_int_distribution<int> dim(2, 50);
    std::uniform_real_distribution<double> log_a(std::log(1e-3), std::log(1e3));
    int accepted = 0;
    while (accepted < 1000) {
        const int d = dim(gen);
        Eigen::VectorXd a(d);
        for (int i = 0; i < d; ++i) {
            a(i) = std::exp(log_a(gen));
        }
        if (a.cwiseInverse().sum() <= 4.0) {
            continue;
        }
        ++accepted;
        const BoxPrior p = allocate_interval_lengths(a);
        EXPECT_LE(p.sum_squares(), 4.0);
        EXPECT_GE(p.payoff, 2 * kE2);
        EXPECT_DOUBLE_EQ(p.payoff, prior_payoff(p.epsilons, a));
    }
}

TEST(BayesBound, CaseOneClosedForm) {
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> u(1.0, 50.0);
    for (int rep = 0; rep < 50; ++rep) {
        const DesignSpec design = diagonal({u(gen), u(gen), u(gen)});
        const GlmFamily f = GlmFamily::gaussian(1.0, 0.05);
        const BoxPrior prior = construct_prior(design, f);
        ASSERT_EQ(prior.prior_case, PriorCase::case1);
        const double closed = 6.0 / (pi * std::pow(e, 3)) * f.scale() / f.curvature_bound() * design.trace_inv_gram();
        EXPECT_LT(testing::relative_error(bayes_risk_lower_bound(design, f, prior), closed), 1e-10);
    }
}

TEST(BayesBound, ZeroPriorAndCaseTwoFloor) {
    const DesignSpec design = diagonal({12, 12, 12, 12, 12});
    const GlmFamily f = GlmFamily::gaussian(1.0, 1.0);
    BoxPrior zero = construct_prior(design, f);
    const BoxPrior p = zero;
    zero.epsilons.setZero();
    EXPECT_EQ(bayes_risk_lower_bound(design, f, zero), 0.0);
    EXPECT_GE(bayes_risk_lower_bound(design, f, p), 1.0 / (pi * std::pow(e, 3)));
}

TEST(BayesBound, WitnessesMinimaxBound) {
    std::mt19937_64 gen(17);
    for (int rep = 0; rep < 200; ++rep) {
        const Eigen::Index d = 1 + rep % 6;
        const double c = std::exp(std::uniform_real_distribution<double>(-3, 3)(gen));
        const DesignSpec design(c * testing::random_matrix(gen, d + 2, d));
        for (const GlmFamily& f : {make_family("gaussian", 0.3, design.radius()), make_family("bernoulli", 1, design.radius()),
                                   make_family("poisson", 1, design.radius())}) {
            const BoundReport r = minimax_lower_bound(design, f);
            EXPECT_GE(r.bayes_bound() * (1 + 1e-12), r.bound_value) << f.name() << " c=" << c;
            EXPECT_LE(r.prior.sum_squares(), 4.0 + 1e-12);
        }
    }
}

TEST(EigenvalueRatio, Examples) {
    const GlmFamily f = GlmFamily::gaussian(2.0, 0.5);
    const DesignSpec id(Eigen::MatrixXd::Identity(3, 3));
    EXPECT_NEAR(eigenvalue_ratio_bound(id, f, 2.0), 3 * 0.5 / 2.0, 1e-15);

    const DesignSpec ill = diagonal({10, 0.1});
    const GlmFamily unit = GlmFamily::gaussian(1.0, 1.0);
    EXPECT_NEAR(eigenvalue_ratio_bound(ill, unit, 1.0), 0.002, 1e-15);
    EXPECT_NEAR(ill.trace_inv_gram(), 10.1, 1e-12);
    EXPECT_NEAR(ill.trace_inv_gram() / eigenvalue_ratio_bound(ill, unit, 1.0), 5050, 1e-8);

    Eigen::MatrixXd rd(2, 2);
    rd << 1, 1, 1, 1;
    EXPECT_THROW(eigenvalue_ratio_bound(DesignSpec(rd), unit, 1.0), PreconditionError);
    EXPECT_THROW(eigenvalue_ratio_bound(id, f, 3.0), PreconditionError);
}

TEST(Heterogeneous, EqualFamiliesMatchHomogeneous) {
    std::mt19937_64 gen(2);
    const DesignSpec design(testing::random_matrix(gen, 3, 2));
    const GlmFamily f = GlmFamily::gaussian(1.0, 0.7);
    const std::vector<GlmFamily> same(3, f);
    EXPECT_DOUBLE_EQ(heterogeneous_lower_bound(design, same).bound_value, minimax_lower_bound(design, f).bound_value);

    const std::vector<GlmFamily> mixed = {GlmFamily::gaussian(1.0, 1.0), GlmFamily::gaussian(1.0, 2.0),
                                          GlmFamily::gaussian(1.0, 3.0)};
    EXPECT_DOUBLE_EQ(heterogeneous_lower_bound(design, mixed).bound_value,
                     minimax_lower_bound(design, GlmFamily::gaussian(1.0, 1.0)).bound_value);
    EXPECT_THROW(heterogeneous_lower_bound(design, std::vector<GlmFamily>(2, f)), PreconditionError);
    EXPECT_THROW(heterogeneous_lower_bound(design, std::vector<GlmFamily>{}), PreconditionError);
}

}  // namespace
}  // namespace glmminimax
