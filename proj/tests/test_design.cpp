#include <gtest/gtest.h>

#include <sstream>

#include "glmminimax/design.hpp"
#include "glmminimax/error.hpp"
#include "glmminimax/text_io.hpp"
#include "test_support.hpp"

namespace glmminimax {
namespace {

using testing::random_matrix;
using testing::random_orthogonal;
using testing::relative_error;

TEST(Design, TraceMatchesDenseInverse) {
    std::mt19937_64 gen(11);
    for (int rep = 0; rep < 50; ++rep) {
        const Eigen::Index d = 1 + rep % 6;
        const Eigen::MatrixXd m = random_matrix(gen, d + 3, d);
        const double dense = (m.transpose() * m).inverse().trace();
        EXPECT_LT(relative_error(trace_inverse_gram(DesignSpec(m)), dense), 1e-9);
    }
}

TEST(Design, HadamardSvd) {
    Eigen::MatrixXd m(2, 2);
    m << 1, 1, 1, -1;
    const DesignSpec design(m);
    EXPECT_NEAR(design.singular_values()(0), std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(design.singular_values()(1), std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(design.trace_inv_gram(), 1.0, 1e-14);

    const DesignSpec bar = reparametrize(design);
    const Eigen::MatrixXd g = bar.gram();
    EXPECT_NEAR(g(0, 0), 2.0, 1e-13);
    EXPECT_NEAR(g(1, 1), 2.0, 1e-13);
    EXPECT_NEAR(g(0, 1), 0.0, 1e-13);
    EXPECT_NEAR(bar.trace_inv_gram(), 1.0, 1e-14);
}

TEST(Design, ReconstructsFromFactors) {
    std::mt19937_64 gen(5);
    const Eigen::MatrixXd m = random_matrix(gen, 6, 3);
    const DesignSpec design(m);
    const Eigen::MatrixXd rebuilt = design.left_factor() * design.singular_values().asDiagonal() *
                                    design.right_factor().leftCols(3).transpose();
    EXPECT_LT((rebuilt - m).norm(), 1e-12);
    EXPECT_LT((design.right_factor().transpose() * design.right_factor() - Eigen::MatrixXd::Identity(3, 3)).norm(),
              1e-12);
}

TEST(Design, SignConventionMakesLargestEntryPositive) {
    std::mt19937_64 gen(9);
    for (int rep = 0; rep < 20; ++rep) {
        const DesignSpec design(random_matrix(gen, 5, 4));
        for (Eigen::Index j = 0; j < 4; ++j) {
            Eigen::Index k = 0;
            design.right_factor().col(j).cwiseAbs().maxCoeff(&k);
            EXPECT_GT(design.right_factor()(k, j), 0.0);
        }
    }
}

TEST(Design, ReparametrizeDiagonalizesRandomDesign) {
    std::mt19937_64 gen(21);
    const DesignSpec design(random_matrix(gen, 6, 3));
    const DesignSpec bar = reparametrize(design);
    Eigen::MatrixXd g = bar.gram();
    g.diagonal().setZero();
    EXPECT_LT(g.cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((bar.singular_values() - design.singular_values()).norm(), 1e-12);
    EXPECT_TRUE(has_diagonal_gram(bar));
}

TEST(Design, ReparametrizeKeepsDiagonalInputUpToSigns) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 2);
    m(0, 0) = 3.0;
    m(1, 1) = -2.0;
    m(2, 1) = 0.5;
    const DesignSpec bar = reparametrize(DesignSpec(m));
    for (Eigen::Index j = 0; j < 2; ++j) {
        const double dot = bar.entries().col(j).dot(m.col(j));
        EXPECT_NEAR(std::abs(dot), m.col(j).squaredNorm(), 1e-12);
    }
}

TEST(Design, ReparametrizeIsIdempotentUpToSigns) {
    std::mt19937_64 gen(3);
    const DesignSpec once = reparametrize(DesignSpec(random_matrix(gen, 7, 4)));
    const DesignSpec twice = reparametrize(once);
    for (Eigen::Index j = 0; j < 4; ++j) {
        EXPECT_NEAR(std::abs(once.entries().col(j).dot(twice.entries().col(j))), once.entries().col(j).squaredNorm(),
                    1e-10);
    }
}

TEST(Design, RotationInvariance) {
    std::mt19937_64 gen(77);
    for (int rep = 0; rep < 100; ++rep) {
        const Eigen::Index d = 2 + rep % 5;
        const Eigen::MatrixXd m = random_matrix(gen, d + 2, d);
        const Eigen::MatrixXd v0 = random_orthogonal(gen, d);
        EXPECT_LT(relative_error(DesignSpec(m * v0).trace_inv_gram(), DesignSpec(m).trace_inv_gram()), 1e-9);
    }
}

TEST(Design, RankDeficiency) {
    Eigen::MatrixXd m(3, 3);
    m << 1, 2, 3, 2, 4, 6, 1, 0, 1;
    const DesignSpec design(m);
    EXPECT_EQ(design.rank(), 2);
    EXPECT_FALSE(design.full_rank());
    EXPECT_TRUE(std::isinf(design.trace_inv_gram()));

    const DesignSpec wide(Eigen::MatrixXd::Ones(2, 4));
    EXPECT_EQ(wide.rank(), 1);
    EXPECT_EQ(wide.right_factor().rows(), 4);
    EXPECT_EQ(wide.right_factor().cols(), 4);
}

TEST(Design, RadiusIsMaxRowNorm) {
    Eigen::MatrixXd m(2, 2);
    m << 3, 4, 1, 1;
    EXPECT_DOUBLE_EQ(DesignSpec(m).radius(), 5.0);
}

TEST(TextIo, ParsesCommentsAndSigns) {
    std::istringstream in("# header comment\n1, -2.5,+3e-1\n\n4,5,6\n");
    const DesignSpec design = load_design(in);
    ASSERT_EQ(design.rows(), 2);
    ASSERT_EQ(design.cols(), 3);
    EXPECT_DOUBLE_EQ(design.entries()(0, 1), -2.5);
    EXPECT_DOUBLE_EQ(design.entries()(0, 2), 0.3);
}

TEST(TextIo, ReportsOffendingToken) {
    std::istringstream ragged("1,2\n3\n");
    EXPECT_THROW(load_design(ragged), ParseError);

    std::istringstream bad("1,2\n3,abc\n");
    try {
        load_design(bad);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.row(), 2u);
        EXPECT_EQ(e.column(), 2u);
        EXPECT_NE(std::string(e.what()).find("abc"), std::string::npos);
    }

    std::istringstream empty("# nothing\n");
    EXPECT_THROW(load_design(empty), ParseError);
    std::istringstream nonfinite("1,inf\n");
    EXPECT_THROW(load_design(nonfinite), ParseError);
}

TEST(TextIo, VectorsFromRowOrColumn) {
    std::istringstream row("1,2,3\n");
    std::istringstream col("1\n2\n3\n");
    EXPECT_EQ(load_vector(row), load_vector(col));
    std::istringstream grid("1,2\n3,4\n");
    EXPECT_THROW(load_vector(grid), ParseError);
}

TEST(TextIo, FormatsTwelveSignificantDigits) {
    EXPECT_EQ(format_real(0.1 / (M_PI * std::exp(3.0))), "0.00158477160656");
    EXPECT_EQ(format_real(1.0), "1");
    EXPECT_EQ(format_real(std::numeric_limits<double>::infinity()), "inf");
}

}  // namespace
}  // namespace glmminimax
