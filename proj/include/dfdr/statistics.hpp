#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string_view>

#include <Eigen/Core>

#include "dfdr/data.hpp"

namespace dfdr {

/// Observed statistics T_i (length m) and resampled null statistics (length m * B).
/// Nulls are ordered permutation-major: null_stats[r * m + i] came from test i under
/// permutation r, so each null value can be traced back to the test that produced it.
struct StatisticSet {
    Eigen::VectorXd observed;
    Eigen::VectorXd null_stats;
    Index permutations = 0;

    Index tests() const { return observed.size(); }
    /// Index of the test that generated null_stats[k].
    Index null_source(Index k) const { return k % observed.size(); }
    /// Throws ValidationError unless null_stats.size() == m * B and no value is NaN.
    void validate() const;
};

struct PValueSet {
    Eigen::VectorXd values;
    Index tests() const { return values.size(); }
};

/// Row-wise |Welch t| between the columns of `a` and the columns of `b`:
///   |mean_a - mean_b| / sqrt(var_a / n_a + var_b / n_b), sample variances with n - 1.
/// A zero standard error yields 0 when the means agree and +inf otherwise.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, 1> welch_abs_t(const Eigen::MatrixBase<DerivedA>& a,
                                                                        const Eigen::MatrixBase<DerivedB>& b) {
    using Scalar = typename DerivedA::Scalar;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const auto na = static_cast<Scalar>(a.cols());
    const auto nb = static_cast<Scalar>(b.cols());
    const Vector mean_a = a.rowwise().mean();
    const Vector mean_b = b.rowwise().mean();
    const Vector var_a = (a.colwise() - mean_a).rowwise().squaredNorm() / (na - 1);
    const Vector var_b = (b.colwise() - mean_b).rowwise().squaredNorm() / (nb - 1);

    Vector t(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const Scalar diff = std::abs(mean_a(i) - mean_b(i));
        const Scalar se = std::sqrt(var_a(i) / na + var_b(i) / nb);
        if (se > 0)
            t(i) = diff / se;
        else
            t(i) = diff == 0 ? Scalar(0) : std::numeric_limits<Scalar>::infinity();
    }
    return t;
}

/// |Welch t| per feature between the subjects labelled `group_a` and `group_b`.
/// Throws ValidationError if a group is absent or has fewer than two members.
Eigen::VectorXd two_sample_abs_t(const DataMatrix& matrix, std::string_view group_a, std::string_view group_b);

/// Throws ValidationError naming the first index outside [0, 1].
PValueSet validate_pvalues(std::span<const double> raw);

}  // namespace dfdr
