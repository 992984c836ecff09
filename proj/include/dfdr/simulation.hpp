#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dfdr/data.hpp"
#include "dfdr/decision.hpp"
#include "dfdr/estimators.hpp"
#include "dfdr/statistics.hpp"

namespace dfdr {

enum class TruthMode {
    fixed,    ///< exactly floor(pi0 * m) true nulls, same tests in every replicate
    mixture,  ///< each test is a true null with probability pi0, redrawn per replicate
};

/// Two-group design: null features are standard normal in both groups, alternative
/// features are shifted by `effect` in group A. With correlation > 0, features in
/// consecutive blocks of `block_size` share an equicorrelated subject factor.
struct SimulationConfig {
    Index tests = 2000;
    double pi0 = 0.8;
    Index replicates = 200;
    Index group_a_size = 10;
    Index group_b_size = 10;
    double effect = 2.0;
    Index permutations = 20;
    std::uint64_t seed = 1;
    TruthMode truth = TruthMode::fixed;
    double correlation = 0.0;
    Index block_size = 1;

    /// Throws UsageError on an invalid configuration.
    void validate() const;
};

struct Instance {
    DataMatrix matrix;               ///< groups labelled "A" and "B"
    std::vector<std::uint8_t> alternative;  ///< H_i: 1 when the null hypothesis is false
};

/// Deterministic in (config.seed, replicate).
Instance generate_instance(const SimulationConfig& config, Index replicate);

using DecisionRule = std::function<DecisionResult(const StatisticSet&)>;

struct NamedRule {
    std::string name;
    DecisionRule decide;
};

NamedRule maximize_rule(const CostBenefit& cb, const Pi0Choice& pi0 = {});
NamedRule control_rule(double alpha, const Pi0Choice& pi0 = {});
/// Rejects T_i >= tau and reports the estimated dFDR at tau.
NamedRule threshold_rule(double tau, const Pi0Choice& pi0 = {});
NamedRule reject_nothing_rule();
NamedRule reject_all_rule();

struct ReplicateOutcome {
    std::optional<double> tau;
    Index rejections = 0;
    Index false_rejections = 0;
    double estimated_dfdr = 0.0;
    double pi0 = 1.0;
    std::vector<double> rejected_stats;         ///< statistics of the rejected tests
    std::vector<std::uint8_t> rejected_is_null; ///< aligned with rejected_stats
};

/// Realized error rates of one rule pooled over replicates.
struct ErrorRateReport {
    std::string rule;
    Index replicates = 0;
    Index total_rejections = 0;
    Index total_false_rejections = 0;
    Index replicates_with_rejections = 0;

    double fdr = 0.0;  ///< mean of V/R (0 when R = 0)
    double fdr_se = 0.0;
    std::optional<double> pfdr;  ///< mean of V/R over replicates with R > 0
    double pfdr_se = 0.0;
    std::optional<double> pfp;   ///< sum V / sum R; undefined when nothing was ever rejected
    double dfdr = 0.0;           ///< pfp, or 0 when undefined
    double dfdr_binomial_se = 0.0;
    /// Realized P(H = 0 | rejected); equal to dfdr at the pooled level.
    double conditional_probability = 0.0;

    double mean_estimated_dfdr = 0.0;
    double estimated_dfdr_se = 0.0;
    double mean_pi0 = 0.0;

    std::vector<ReplicateOutcome> outcomes;
};

/// Runs statistics, permutation null and every rule on the same replicate data.
std::vector<ErrorRateReport> measure_error_rates(const SimulationConfig& config, std::span<const NamedRule> rules);
ErrorRateReport measure_error_rates(const SimulationConfig& config, const NamedRule& rule);

/// [lower, upper) measured as an offset from each replicate's own threshold.
struct LocalBin {
    double lower = 0.0;
    double upper = 0.0;
};

struct LocalRate {
    LocalBin bin;
    Index rejections = 0;
    Index false_rejections = 0;
    double rate = 0.0;  ///< 0 for an empty bin
    double binomial_se = 0.0;
};

/// Pooled false-rejection fraction per bin. Throws UsageError on overlapping or negative bins.
std::vector<LocalRate> measure_local_dfdr(const ErrorRateReport& report, std::span<const LocalBin> bins);

/// The bin [0, h) at the border of the rejection region, with h the smallest offset
/// such that at least `share` of pooled rejections lie inside.
LocalBin boundary_bin(const ErrorRateReport& report, double share = 0.05);

/// Closed-form tail P(T >= tau) of |Welch t| for null and alternative features.
/// Requires equal group sizes, where the statistic is exactly Student / noncentral t.
double null_tail(const SimulationConfig& config, double tau);
double alternative_tail(const SimulationConfig& config, double tau);
/// pi0 * null_tail / (pi0 * null_tail + (1 - pi0) * alternative_tail), 0 when both tails vanish.
/// In fixed mode pi0 is floor(pi0 * m) / m.
double analytic_dfdr(const SimulationConfig& config, double tau);

}  // namespace dfdr
