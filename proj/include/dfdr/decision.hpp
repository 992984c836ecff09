#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dfdr/data.hpp"
#include "dfdr/estimators.hpp"
#include "dfdr/resampling.hpp"
#include "dfdr/statistics.hpp"

namespace dfdr {

struct CurvePoint {
    double tau = 0.0;
    double dfdr = 0.0;
    double desirability = 0.0;
    Index discoveries = 0;
};

/// A chosen rejection region [tau, inf) and everything evaluated on the way.
/// For p-value decisions tau is the p-value cutoff and the region is [0, tau].
struct DecisionResult {
    std::optional<double> tau;   ///< empty when the decision rejects nothing
    std::vector<Index> rejected; ///< ascending test indices
    double dfdr = 0.0;
    double desirability = 0.0;
    Pi0Estimate pi0;
    std::vector<CurvePoint> curve;  ///< every candidate threshold, ascending tau

    Index discoveries() const { return static_cast<Index>(rejected.size()); }
};

/// argmax of the estimated desirability over tau in {T_i}. Ties go to the larger tau;
/// when no candidate has positive desirability nothing is rejected (desirability 0).
DecisionResult maximize_desirability(const StatisticSet& stats, const Pi0Estimate& pi0, const CostBenefit& cb);

/// Smallest tau in {T_i} whose estimated dFDR is <= alpha. `reporting` only sets the
/// cost/benefit used for the desirability column of the result and its curve.
DecisionResult control_dfdr(const StatisticSet& stats, const Pi0Estimate& pi0, double alpha,
                            const CostBenefit& reporting = {});

/// p-value counterparts: candidates are the p-values themselves, rejection is P_i <= cutoff,
/// and ties go to the smaller cutoff.
DecisionResult maximize_desirability(const PValueSet& pvalues, const Pi0Estimate& pi0, const CostBenefit& cb);
DecisionResult control_dfdr(const PValueSet& pvalues, const Pi0Estimate& pi0, double alpha,
                            const CostBenefit& reporting = {});

/// Tests sharing one cost/benefit pair: `features` (matrix rows) compared between two groups.
struct Subset {
    std::string name;
    std::vector<Index> features;
    std::string group_a;
    std::string group_b;
    CostBenefit cost_benefit;
};

/// Disjoint subsets covering every (feature, comparison) test.
struct SubsetPartition {
    std::vector<Subset> subsets;
    Index min_size = 50;

    /// Throws ValidationError naming the offending subset: undersized, unknown feature,
    /// overlapping another subset of the same comparison, or a comparison left uncovered.
    void validate(Index features) const;
};

struct SubsetResult {
    std::string name;
    StatisticSet stats;
    DecisionResult decision;
};

/// Optimizes each subset on its own: nulls from that subset's tests only, its own pi0 and
/// lambda, and its own cost/benefit. Every subset reuses plan.seed.
std::vector<SubsetResult> per_subset_optimize(const SubsetPartition& partition, const DataMatrix& matrix,
                                              const PermutationPlan& plan, const Pi0Choice& pi0 = {});

/// Concatenates statistic sets with equal B into one permutation-major set.
StatisticSet pool_statistics(std::span<const StatisticSet> parts);

/// Weighted desirability sum(b_i R_i) - dfdr_w(tau) * sum(w_i R_i) maximized over tau in {T_i},
/// with w = b + c. Same tie and empty-region rules as maximize_desirability.
/// Throws ValidationError on negative or all-zero weights, or mismatched sizes.
DecisionResult common_threshold_weighted(const StatisticSet& pooled, const Eigen::VectorXd& weights,
                                         const Eigen::VectorXd& benefits, const Pi0Estimate& pi0_weighted);

}  // namespace dfdr
