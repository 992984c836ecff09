#include "dfdr/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dfdr/error.hpp"

namespace dfdr {

namespace {

Index count_at_least(const Eigen::VectorXd& values, double tau) {
    return (values.array() >= tau).count();
}

void check_weights(const StatisticSet& stats, const Eigen::VectorXd& weights) {
    if (weights.size() != stats.tests())
        throw ValidationError("expected " + std::to_string(stats.tests()) + " weights, got " +
                              std::to_string(weights.size()));
    for (Index i = 0; i < weights.size(); ++i)
        if (!(weights(i) >= 0.0) || !std::isfinite(weights(i)))
            throw ValidationError("weight at index " + std::to_string(i) + " is negative or not finite");
}

// Candidate lambdas and the (weighted) share of nulls strictly below each.
template <typename ShareBelow>
double closest_lambda(std::vector<double> candidates, ShareBelow share_below) {
    candidates.push_back(std::numeric_limits<double>::infinity());
    double best = candidates.front();
    double best_distance = std::numeric_limits<double>::infinity();
    for (const double lambda : candidates) {
        const double distance = std::abs(share_below(lambda) - kLambdaTargetProportion);
        if (distance < best_distance) {
            best = lambda;
            best_distance = distance;
        }
    }
    return best;
}

}  // namespace

Pi0Estimate Pi0Estimate::supplied(double value) {
    if (!(value >= 0.0 && value <= 1.0)) throw ValidationError("pi0 must lie in [0, 1]");
    return {value, std::numeric_limits<double>::quiet_NaN(), Pi0Mode::user_supplied};
}

CostBenefit CostBenefit::from_probability(double p) { return {1.0, p_to_cost_ratio(p)}; }

CostBenefit CostBenefit::from_ratio(double cost_ratio) {
    if (!(cost_ratio >= 0.0) || !std::isfinite(cost_ratio))
        throw UsageError("cost-to-benefit ratio must be finite and nonnegative");
    return {1.0, cost_ratio};
}

double p_to_cost_ratio(double p) {
    if (!(p > 0.0 && p <= 1.0)) throw UsageError("probability threshold must lie in (0, 1]");
    return 1.0 / p - 1.0;
}

ExceedanceCounter::ExceedanceCounter(const Eigen::VectorXd& values)
    : sorted_(values.data(), values.data() + values.size()) {
    std::sort(sorted_.begin(), sorted_.end());
}

Index ExceedanceCounter::at_least(double tau) const {
    return static_cast<Index>(sorted_.end() - std::lower_bound(sorted_.begin(), sorted_.end(), tau));
}

std::vector<double> ExceedanceCounter::distinct() const {
    std::vector<double> values(sorted_);
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

double choose_lambda(const Eigen::VectorXd& null_stats) {
    const ExceedanceCounter nulls(null_stats);
    const auto total = static_cast<double>(nulls.size());
    return closest_lambda(nulls.distinct(),
                          [&](double lambda) { return static_cast<double>(nulls.below(lambda)) / total; });
}

Pi0Estimate estimate_pi0(const Eigen::VectorXd& observed, const Eigen::VectorXd& null_stats, double lambda) {
    const Index null_below = (null_stats.array() < lambda).count();
    if (null_below == 0)
        throw EstimationError("no null statistic lies below lambda; pi0 is undefined (use pi0 = 1 instead)");
    const Index observed_below = (observed.array() < lambda).count();
    const double raw = (static_cast<double>(observed_below) / static_cast<double>(observed.size())) /
                       (static_cast<double>(null_below) / static_cast<double>(null_stats.size()));
    return {std::clamp(raw, 0.0, 1.0), lambda, Pi0Mode::estimated};
}

Pi0Estimate estimate_pi0(const StatisticSet& stats) {
    return estimate_pi0(stats.observed, stats.null_stats, choose_lambda(stats.null_stats));
}

Pi0Estimate resolve_pi0(const StatisticSet& stats, const Pi0Choice& choice) {
    switch (choice.mode) {
        case Pi0Mode::estimated: return estimate_pi0(stats);
        case Pi0Mode::user_supplied: return Pi0Estimate::supplied(choice.value);
        case Pi0Mode::fixed_one: break;
    }
    return Pi0Estimate::one();
}

DfdrEstimate estimate_dfdr_at_tau(const StatisticSet& stats, const Pi0Estimate& pi0, double tau) {
    DfdrEstimate estimate{tau, 0.0, count_at_least(stats.observed, tau), count_at_least(stats.null_stats, tau)};
    if (estimate.discoveries == 0) return estimate;
    const auto m = static_cast<double>(stats.tests());
    const auto total_null = static_cast<double>(stats.null_stats.size());
    estimate.value = pi0.value * (static_cast<double>(estimate.null_exceedances) / total_null) /
                     (static_cast<double>(estimate.discoveries) / m);
    return estimate;
}

DfdrEstimate estimate_dfdr_at_pvalue(const PValueSet& pvalues, const Pi0Estimate& pi0, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw UsageError("p-value threshold must lie in [0, 1]");
    DfdrEstimate estimate{threshold, 0.0, (pvalues.values.array() <= threshold).count(), 0};
    if (estimate.discoveries == 0) return estimate;
    estimate.value = pi0.value * threshold /
                     (static_cast<double>(estimate.discoveries) / static_cast<double>(pvalues.tests()));
    return estimate;
}

Pi0Estimate estimate_pvalue_pi0(const PValueSet& pvalues) {
    const double lambda = 1.0 - kLambdaTargetProportion;
    const Index above = (pvalues.values.array() > lambda).count();
    const double raw = (static_cast<double>(above) / static_cast<double>(pvalues.tests())) / kLambdaTargetProportion;
    return {std::clamp(raw, 0.0, 1.0), lambda, Pi0Mode::estimated};
}

double estimate_desirability(const StatisticSet& stats, const Pi0Estimate& pi0, const CostBenefit& cb, double tau) {
    if (!(cb.benefit > 0.0)) throw UsageError("benefit must be positive");
    const auto dfdr = estimate_dfdr_at_tau(stats, pi0, tau);
    return cb.benefit * (1.0 - (1.0 + cb.ratio()) * dfdr.value) * static_cast<double>(dfdr.discoveries);
}

Eigen::VectorXd null_weights(const StatisticSet& stats, const Eigen::VectorXd& weights) {
    return weights.replicate(stats.permutations, 1);
}

double estimate_weighted_dfdr(const StatisticSet& stats, const Pi0Estimate& pi0, const Eigen::VectorXd& weights,
                              double tau) {
    check_weights(stats, weights);
    const double rejected_mass = (stats.observed.array() >= tau).select(weights, 0.0).sum();
    if (rejected_mass == 0.0) return 0.0;
    const Eigen::VectorXd nw = null_weights(stats, weights);
    const double null_mass = (stats.null_stats.array() >= tau).select(nw, 0.0).sum();
    const auto m = static_cast<double>(stats.tests());
    const auto total_null = static_cast<double>(stats.null_stats.size());
    return pi0.value * (null_mass / total_null) / (rejected_mass / m);
}

Pi0Estimate estimate_weighted_pi0(const StatisticSet& stats, const Eigen::VectorXd& weights) {
    check_weights(stats, weights);
    if (weights.sum() == 0.0) throw ValidationError("all weights are zero");
    const Eigen::VectorXd nw = null_weights(stats, weights);
    const double null_total = nw.sum();

    // Sort nulls once; prefix weight sums give the weighted share below each candidate.
    std::vector<Index> order(static_cast<std::size_t>(stats.null_stats.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(),
              [&](Index a, Index b) { return stats.null_stats(a) < stats.null_stats(b); });
    std::vector<double> values, mass_below;
    double running = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const double v = stats.null_stats(order[k]);
        if (k == 0 || v != values.back()) {
            values.push_back(v);
            mass_below.push_back(running);
        }
        running += nw(order[k]);
    }
    const double lambda = closest_lambda(values, [&](double candidate) {
        const auto it = std::lower_bound(values.begin(), values.end(), candidate);
        const double below = it == values.end() ? running : mass_below[static_cast<std::size_t>(it - values.begin())];
        return below / null_total;
    });

    const double null_below = (stats.null_stats.array() < lambda).select(nw, 0.0).sum();
    if (null_below == 0.0)
        throw EstimationError("no weighted null mass lies below lambda; pi0 is undefined (use pi0 = 1 instead)");
    const double observed_below = (stats.observed.array() < lambda).select(weights, 0.0).sum();
    const double raw = (observed_below / static_cast<double>(stats.tests())) /
                       (null_below / static_cast<double>(stats.null_stats.size()));
    return {std::clamp(raw, 0.0, 1.0), lambda, Pi0Mode::estimated};
}

}  // namespace dfdr
