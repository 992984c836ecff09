#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "dfdr/data.hpp"
#include "dfdr/statistics.hpp"

namespace dfdr {

/// B whole-column label permutations drawn from `seed`. Permutation r uses the
/// mt19937_64 substream seeded with mix_seed(seed, r), so any permutation can be
/// regenerated independently of the others.
struct PermutationPlan {
    Index permutations = 1000;
    std::uint64_t seed = 1;
};

/// Statistic over (group A columns, group B columns), one value per row.
using TwoSampleStatistic = std::function<Eigen::VectorXd(const Eigen::Ref<const Eigen::MatrixXd>&,
                                                         const Eigen::Ref<const Eigen::MatrixXd>&)>;

/// The default statistic: welch_abs_t.
TwoSampleStatistic welch_statistic();

/// Permutation r of the plan over n subjects.
std::vector<Index> draw_permutation(const PermutationPlan& plan, Index r, Index n);

/// Null statistics for explicit permutations of the subjects in group_a then group_b
/// (matrix column order within each group). Under permutation p the first n_a entries
/// of p pick the relabelled group A. Output is permutation-major, length m * perms.size().
Eigen::VectorXd permutation_null(const DataMatrix& matrix, std::string_view group_a, std::string_view group_b,
                                 std::span<const std::vector<Index>> permutations,
                                 const TwoSampleStatistic& statistic = welch_statistic());

/// Null statistics for plan.permutations random permutations; deterministic given plan.seed.
Eigen::VectorXd permutation_null(const DataMatrix& matrix, std::string_view group_a, std::string_view group_b,
                                 const PermutationPlan& plan,
                                 const TwoSampleStatistic& statistic = welch_statistic());

/// Observed |Welch t| plus its permutation null.
StatisticSet permutation_statistics(const DataMatrix& matrix, std::string_view group_a, std::string_view group_b,
                                    const PermutationPlan& plan);

}  // namespace dfdr
