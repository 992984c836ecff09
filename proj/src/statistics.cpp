#include "dfdr/statistics.hpp"

#include <string>
#include <vector>

#include "dfdr/error.hpp"

namespace dfdr {

void StatisticSet::validate() const {
    if (observed.size() < 1) throw ValidationError("no observed statistics");
    if (permutations < 0 || null_stats.size() != observed.size() * permutations)
        throw ValidationError("null statistic count " + std::to_string(null_stats.size()) + " is not m * B = " +
                              std::to_string(observed.size()) + " * " + std::to_string(permutations));
    if (observed.hasNaN() || null_stats.hasNaN()) throw ValidationError("statistics contain NaN");
}

Eigen::VectorXd two_sample_abs_t(const DataMatrix& matrix, std::string_view group_a, std::string_view group_b) {
    const auto a = matrix.columns_in(group_a);
    const auto b = matrix.columns_in(group_b);
    if (a.empty()) throw ValidationError("group '" + std::string(group_a) + "' not present in labels");
    if (b.empty()) throw ValidationError("group '" + std::string(group_b) + "' not present in labels");
    if (a.size() < 2 || b.size() < 2) throw ValidationError("each group needs at least two subjects");
    // Same evaluation path as the permutation null, so the identity permutation
    // reproduces the observed statistics bit for bit.
    std::vector<Index> columns(a);
    columns.insert(columns.end(), b.begin(), b.end());
    const Eigen::MatrixXd pooled = matrix.values(Eigen::all, columns);
    const auto n_a = static_cast<Index>(a.size());
    const Eigen::Ref<const Eigen::MatrixXd> left = pooled.leftCols(n_a);
    const Eigen::Ref<const Eigen::MatrixXd> right = pooled.rightCols(pooled.cols() - n_a);
    return welch_abs_t(left, right);
}

PValueSet validate_pvalues(std::span<const double> raw) {
    PValueSet set{Eigen::VectorXd(static_cast<Index>(raw.size()))};
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!(raw[i] >= 0.0 && raw[i] <= 1.0))
            throw ValidationError("p-value at index " + std::to_string(i) + " is outside [0, 1]");
        set.values(static_cast<Index>(i)) = raw[i];
    }
    return set;
}

}  // namespace dfdr
