#include "glmminimax/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "glmminimax/error.hpp"

namespace glmminimax {

DesignSpec::DesignSpec(Eigen::MatrixXd entries, RankPolicy policy) : entries_(std::move(entries)) {
    if (entries_.rows() < 1 || entries_.cols() < 1) {
        throw PreconditionError("design matrix must have at least one row and one column");
    }
    if (!entries_.allFinite()) {
        throw PreconditionError("design matrix entries must be finite");
    }
    if (!(policy.tolerance_scale > 0.0)) {
        throw PreconditionError("rank tolerance scale must be positive");
    }

    const Eigen::Index n = entries_.rows();
    const Eigen::Index d = entries_.cols();
    const Eigen::Index k = std::min(n, d);

    Eigen::BDCSVD<Eigen::MatrixXd> svd(entries_, Eigen::ComputeThinU | Eigen::ComputeFullV);
    singular_values_ = svd.singularValues();
    right_factor_ = svd.matrixV();
    left_factor_ = svd.matrixU();

    // Deterministic orientation: largest-magnitude entry of each right
    // singular vector is positive. Flip the matching left vector too.
    for (Eigen::Index j = 0; j < d; ++j) {
        Eigen::Index arg = 0;
        right_factor_.col(j).cwiseAbs().maxCoeff(&arg);
        if (right_factor_(arg, j) < 0.0) {
            right_factor_.col(j) *= -1.0;
            if (j < k) {
                left_factor_.col(j) *= -1.0;
            }
        }
    }

    const double sigma_max = k > 0 ? singular_values_(0) : 0.0;
    rank_threshold_ = sigma_max * static_cast<double>(std::max(n, d)) *
                      std::numeric_limits<double>::epsilon() * policy.tolerance_scale;
    rank_ = 0;
    for (Eigen::Index i = 0; i < k; ++i) {
        if (singular_values_(i) > rank_threshold_) {
            ++rank_;
        }
    }

    if (rank_ == d) {
        trace_inv_gram_ = (singular_values_.array().square().inverse()).sum();
    } else {
        trace_inv_gram_ = std::numeric_limits<double>::infinity();
    }
    radius_ = entries_.rowwise().norm().maxCoeff();
}

double trace_inverse_gram(const DesignSpec& design) { return design.trace_inv_gram(); }

DesignSpec reparametrize(const DesignSpec& design) {
    DesignSpec out;
    out.entries_ = design.entries_ * design.right_factor_;
    out.singular_values_ = design.singular_values_;
    out.left_factor_ = design.left_factor_;
    out.right_factor_ = Eigen::MatrixXd::Identity(design.cols(), design.cols());
    out.rank_ = design.rank_;
    out.trace_inv_gram_ = design.trace_inv_gram_;
    out.rank_threshold_ = design.rank_threshold_;
    out.radius_ = out.entries_.rowwise().norm().maxCoeff();
    return out;
}

bool has_diagonal_gram(const DesignSpec& design, double tol) {
    const Eigen::MatrixXd g = design.gram();
    const double scale = std::max(g.diagonal().cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        for (Eigen::Index j = 0; j < g.cols(); ++j) {
            if (i != j && std::abs(g(i, j)) > tol * scale) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace glmminimax
