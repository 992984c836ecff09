#pragma once

#include <limits>
#include <vector>

#include <Eigen/Core>

#include "dfdr/statistics.hpp"

namespace dfdr {

/// Target proportion of null statistics below lambda: Phi(1/2) - Phi(-1/2).
inline constexpr double kLambdaTargetProportion = 0.382925;

enum class Pi0Mode { estimated, fixed_one, user_supplied };

struct Pi0Estimate {
    double value = 1.0;
    double lambda = std::numeric_limits<double>::infinity();
    Pi0Mode mode = Pi0Mode::fixed_one;

    static Pi0Estimate one() { return {}; }
    /// Throws ValidationError outside [0, 1].
    static Pi0Estimate supplied(double value);
};

/// How pi0 is obtained for an analysis: estimated from the data, fixed at 1, or a given value.
struct Pi0Choice {
    Pi0Mode mode = Pi0Mode::estimated;
    double value = 1.0;  ///< used when mode == user_supplied
};

/// Benefit of a true discovery and cost of a false one, shared by every test in scope.
struct CostBenefit {
    double benefit = 1.0;
    double cost = 19.0;

    double ratio() const { return cost / benefit; }
    /// p = 1 / (1 + c/b), the bound on the false-rejection probability inside the optimal region.
    double probability_threshold() const { return 1.0 / (1.0 + ratio()); }

    /// Benefit 1 and cost c/b = 1/p - 1.
    static CostBenefit from_probability(double p);
    static CostBenefit from_ratio(double cost_ratio);
};

struct DfdrEstimate {
    double tau = 0.0;
    double value = 0.0;
    Index discoveries = 0;
    Index null_exceedances = 0;
};

/// c/b = 1/p - 1. Throws UsageError unless 0 < p <= 1.
double p_to_cost_ratio(double p);

/// Sorted copy of a statistic vector answering threshold counts in O(log n).
class ExceedanceCounter {
public:
    explicit ExceedanceCounter(const Eigen::VectorXd& values);

    Index size() const { return static_cast<Index>(sorted_.size()); }
    /// #{v >= tau}
    Index at_least(double tau) const;
    /// #{v < tau}
    Index below(double tau) const { return size() - at_least(tau); }
    /// Distinct values in ascending order.
    std::vector<double> distinct() const;

private:
    std::vector<double> sorted_;
};

/// Lambda from {null_stats} U {+inf} whose proportion of nulls strictly below it is
/// closest to kLambdaTargetProportion; ties go to the smaller lambda.
double choose_lambda(const Eigen::VectorXd& null_stats);

/// (#{T_i < lambda} / m) / (#{T0 < lambda} / M), clamped into [0, 1].
/// Throws EstimationError when no null statistic lies below lambda.
Pi0Estimate estimate_pi0(const Eigen::VectorXd& observed, const Eigen::VectorXd& null_stats, double lambda);
/// estimate_pi0 at choose_lambda(stats.null_stats).
Pi0Estimate estimate_pi0(const StatisticSet& stats);

/// pi0 * (#{T0 >= tau} / (mB)) / (#{T_i >= tau} / m), or 0 when nothing is rejected.
DfdrEstimate estimate_dfdr_at_tau(const StatisticSet& stats, const Pi0Estimate& pi0, double tau);

/// pi0 * threshold / (#{P_i <= threshold} / m), or 0 when nothing is rejected.
/// Throws UsageError unless threshold is in [0, 1].
DfdrEstimate estimate_dfdr_at_pvalue(const PValueSet& pvalues, const Pi0Estimate& pi0, double threshold);

/// pi0 for uniform null p-values: the share of p-values above 1 - kLambdaTargetProportion,
/// divided by kLambdaTargetProportion, clamped into [0, 1].
Pi0Estimate estimate_pvalue_pi0(const PValueSet& pvalues);

/// b * (1 - (1 + c/b) * dfdr(tau)) * #{T_i >= tau}. Throws UsageError unless b > 0.
double estimate_desirability(const StatisticSet& stats, const Pi0Estimate& pi0, const CostBenefit& cb, double tau);

/// Weighted dFDR with per-test weights; each null statistic carries the weight of its
/// source test. Returns 0 when the weighted rejection mass is 0.
/// Throws ValidationError on a negative weight or a size mismatch.
double estimate_weighted_dfdr(const StatisticSet& stats, const Pi0Estimate& pi0, const Eigen::VectorXd& weights,
                              double tau);

/// Weighted analog of estimate_pi0: every indicator count becomes a weight sum, and
/// lambda is chosen on the weighted null proportion. Throws ValidationError if all
/// weights are zero, EstimationError if no weighted null mass lies below lambda.
Pi0Estimate estimate_weighted_pi0(const StatisticSet& stats, const Eigen::VectorXd& weights);

/// Applies a Pi0Choice to a statistic set.
Pi0Estimate resolve_pi0(const StatisticSet& stats, const Pi0Choice& choice);

/// Weight of every null statistic, expanded from the per-test weights.
Eigen::VectorXd null_weights(const StatisticSet& stats, const Eigen::VectorXd& weights);

}  // namespace dfdr
