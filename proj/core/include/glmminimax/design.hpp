#pragma once

#include <Eigen/Dense>

namespace glmminimax {

/// Controls the numerical rank cutoff. A singular value counts as zero when
/// it is at most sigma_max * max(n, d) * epsilon * tolerance_scale.
struct RankPolicy {
    double tolerance_scale = 1.0;
};

/// An n x d design matrix together with its singular value decomposition.
///
/// The object is immutable after construction. Singular values are stored
/// nonincreasing; the right factor V is a full d x d orthogonal matrix whose
/// columns are sign-normalized so that each column's largest-magnitude entry
/// is positive. The left factor U holds the n x min(n, d) thin factor matching
/// that sign convention, so entries() == U * diag(sigma) * V(:, 0:k)^T.
class DesignSpec {
public:
    explicit DesignSpec(Eigen::MatrixXd entries, RankPolicy policy = {});

    const Eigen::MatrixXd& entries() const noexcept { return entries_; }
    Eigen::Index rows() const noexcept { return entries_.rows(); }
    Eigen::Index cols() const noexcept { return entries_.cols(); }

    const Eigen::VectorXd& singular_values() const noexcept { return singular_values_; }
    const Eigen::MatrixXd& left_factor() const noexcept { return left_factor_; }
    const Eigen::MatrixXd& right_factor() const noexcept { return right_factor_; }

    Eigen::Index rank() const noexcept { return rank_; }
    bool full_rank() const noexcept { return rank_ == cols(); }

    /// Tr((M^T M)^{-1}), +infinity when rank < d.
    double trace_inv_gram() const noexcept { return trace_inv_gram_; }

    /// Singular values at or below this are treated as zero.
    double rank_threshold() const noexcept { return rank_threshold_; }

    /// max_i ||m_i||_2 over the rows.
    double radius() const noexcept { return radius_; }

    Eigen::MatrixXd gram() const { return entries_.transpose() * entries_; }

private:
    DesignSpec() = default;
    friend DesignSpec reparametrize(const DesignSpec& design);

    Eigen::MatrixXd entries_;
    Eigen::VectorXd singular_values_;
    Eigen::MatrixXd left_factor_;
    Eigen::MatrixXd right_factor_;
    Eigen::Index rank_ = 0;
    double trace_inv_gram_ = 0.0;
    double rank_threshold_ = 0.0;
    double radius_ = 0.0;
};

double trace_inverse_gram(const DesignSpec& design);

/// Rotates the parameter so the Gram matrix becomes diagonal: returns the
/// design M V with identity right factor and unchanged singular values.
DesignSpec reparametrize(const DesignSpec& design);

/// True when every off-diagonal Gram entry is below tol times the largest
/// diagonal entry.
bool has_diagonal_gram(const DesignSpec& design, double tol = 1e-10);

}  // namespace glmminimax
