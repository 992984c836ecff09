#include "dfdr/resampling.hpp"

#include <string>

#include "dfdr/error.hpp"
#include "dfdr/random.hpp"

namespace dfdr {

namespace {

std::vector<Index> pooled_columns(const DataMatrix& matrix, std::string_view group_a, std::string_view group_b,
                                  Index& n_a) {
    auto a = matrix.columns_in(group_a);
    const auto b = matrix.columns_in(group_b);
    if (a.size() < 2) throw ValidationError("group '" + std::string(group_a) + "' needs at least two subjects");
    if (b.size() < 2) throw ValidationError("group '" + std::string(group_b) + "' needs at least two subjects");
    n_a = static_cast<Index>(a.size());
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

TwoSampleStatistic welch_statistic() {
    return [](const Eigen::Ref<const Eigen::MatrixXd>& a, const Eigen::Ref<const Eigen::MatrixXd>& b) {
        return Eigen::VectorXd(welch_abs_t(a, b));
    };
}

std::vector<Index> draw_permutation(const PermutationPlan& plan, Index r, Index n) {
    Rng rng(mix_seed(plan.seed, static_cast<std::uint64_t>(r)));
    return rng.permutation(n);
}

Eigen::VectorXd permutation_null(const DataMatrix& matrix, std::string_view group_a, std::string_view group_b,
                                 std::span<const std::vector<Index>> permutations,
                                 const TwoSampleStatistic& statistic) {
    Index n_a = 0;
    const auto columns = pooled_columns(matrix, group_a, group_b, n_a);
    const auto n = static_cast<Index>(columns.size());
    const Index m = matrix.features();

    Eigen::VectorXd null(m * static_cast<Index>(permutations.size()));
    std::vector<Index> relabelled(columns.size());
    for (std::size_t r = 0; r < permutations.size(); ++r) {
        const auto& p = permutations[r];
        if (static_cast<Index>(p.size()) != n)
            throw ValidationError("permutation " + std::to_string(r) + " has the wrong length");
        for (std::size_t k = 0; k < p.size(); ++k) relabelled[k] = columns.at(static_cast<std::size_t>(p[k]));
        const Eigen::MatrixXd shuffled = matrix.values(Eigen::all, relabelled);
        const Eigen::Ref<const Eigen::MatrixXd> left = shuffled.leftCols(n_a);
        const Eigen::Ref<const Eigen::MatrixXd> right = shuffled.rightCols(n - n_a);
        null.segment(static_cast<Index>(r) * m, m) = statistic(left, right);
    }
    return null;
}

Eigen::VectorXd permutation_null(const DataMatrix& matrix, std::string_view group_a, std::string_view group_b,
                                 const PermutationPlan& plan, const TwoSampleStatistic& statistic) {
    if (plan.permutations < 1) throw UsageError("permutation count must be at least 1");
    Index n_a = 0;
    const auto n = static_cast<Index>(pooled_columns(matrix, group_a, group_b, n_a).size());
    std::vector<std::vector<Index>> permutations;
    permutations.reserve(static_cast<std::size_t>(plan.permutations));
    for (Index r = 0; r < plan.permutations; ++r) permutations.push_back(draw_permutation(plan, r, n));
    return permutation_null(matrix, group_a, group_b, permutations, statistic);
}

StatisticSet permutation_statistics(const DataMatrix& matrix, std::string_view group_a, std::string_view group_b,
                                    const PermutationPlan& plan) {
    StatisticSet stats;
    stats.observed = two_sample_abs_t(matrix, group_a, group_b);
    stats.null_stats = permutation_null(matrix, group_a, group_b, plan);
    stats.permutations = plan.permutations;
    return stats;
}

}  // namespace dfdr
