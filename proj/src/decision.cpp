#include "dfdr/decision.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "dfdr/error.hpp"

namespace dfdr {

namespace {

// Picks from a curve sorted by ascending tau. Larger tau means fewer rejections.
std::optional<std::size_t> argmax_desirability(const std::vector<CurvePoint>& curve) {
    std::optional<std::size_t> best;
    double best_value = 0.0;  // the empty region
    for (std::size_t k = curve.size(); k-- > 0;) {
        if (curve[k].desirability > best_value) {
            best = k;
            best_value = curve[k].desirability;
        }
    }
    return best;
}

std::optional<std::size_t> first_controlled(const std::vector<CurvePoint>& curve, double alpha) {
    for (std::size_t k = 0; k < curve.size(); ++k)
        if (curve[k].dfdr <= alpha) return k;
    return std::nullopt;
}

template <typename Rejects>
DecisionResult assemble(std::vector<CurvePoint> curve, std::optional<std::size_t> chosen, const Pi0Estimate& pi0,
                        Index tests, Rejects rejects) {
    DecisionResult result;
    result.pi0 = pi0;
    if (chosen) {
        const auto& point = curve[*chosen];
        result.tau = point.tau;
        result.dfdr = point.dfdr;
        result.desirability = point.desirability;
        for (Index i = 0; i < tests; ++i)
            if (rejects(i, point.tau)) result.rejected.push_back(i);
    }
    result.curve = std::move(curve);
    return result;
}

std::vector<CurvePoint> statistic_curve(const StatisticSet& stats, const Pi0Estimate& pi0, const CostBenefit& cb) {
    if (!(cb.benefit > 0.0)) throw UsageError("benefit must be positive");
    stats.validate();
    const ExceedanceCounter observed(stats.observed);
    const ExceedanceCounter nulls(stats.null_stats);
    const auto m = static_cast<double>(stats.tests());
    const auto total_null = static_cast<double>(stats.null_stats.size());

    std::vector<CurvePoint> curve;
    for (const double tau : observed.distinct()) {
        CurvePoint point{tau, 0.0, 0.0, observed.at_least(tau)};
        const auto exceed = static_cast<double>(nulls.at_least(tau));
        point.dfdr = pi0.value * (exceed / total_null) / (static_cast<double>(point.discoveries) / m);
        point.desirability =
            cb.benefit * (1.0 - (1.0 + cb.ratio()) * point.dfdr) * static_cast<double>(point.discoveries);
        curve.push_back(point);
    }
    return curve;
}

std::vector<CurvePoint> pvalue_curve(const PValueSet& pvalues, const Pi0Estimate& pi0, const CostBenefit& cb) {
    if (!(cb.benefit > 0.0)) throw UsageError("benefit must be positive");
    std::vector<double> sorted(pvalues.values.data(), pvalues.values.data() + pvalues.values.size());
    std::sort(sorted.begin(), sorted.end());
    const auto m = static_cast<double>(sorted.size());

    std::vector<CurvePoint> curve;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        if (k + 1 < sorted.size() && sorted[k + 1] == sorted[k]) continue;
        const double cutoff = sorted[k];
        CurvePoint point{cutoff, 0.0, 0.0, static_cast<Index>(k + 1)};
        point.dfdr = pi0.value * cutoff / (static_cast<double>(point.discoveries) / m);
        point.desirability =
            cb.benefit * (1.0 - (1.0 + cb.ratio()) * point.dfdr) * static_cast<double>(point.discoveries);
        curve.push_back(point);
    }
    return curve;
}

// Descending cutoffs reject fewer p-values, so the scans run on the reversed curve.
std::optional<std::size_t> reversed_index(std::optional<std::size_t> k, std::size_t size) {
    if (!k) return k;
    return size - 1 - *k;
}

// Sorted values with suffix sums of their weights.
class WeightedTail {
public:
    WeightedTail(const Eigen::VectorXd& values, const Eigen::VectorXd& weights) {
        std::vector<std::pair<double, double>> entries;
        entries.reserve(static_cast<std::size_t>(values.size()));
        for (Index i = 0; i < values.size(); ++i) entries.emplace_back(values(i), weights(i));
        std::sort(entries.begin(), entries.end());
        values_.reserve(entries.size());
        suffix_.assign(entries.size() + 1, 0.0);
        for (const auto& e : entries) values_.push_back(e.first);
        for (std::size_t k = entries.size(); k-- > 0;) suffix_[k] = suffix_[k + 1] + entries[k].second;
    }

    double mass_at_least(double tau) const {
        const auto it = std::lower_bound(values_.begin(), values_.end(), tau);
        return suffix_[static_cast<std::size_t>(it - values_.begin())];
    }

private:
    std::vector<double> values_;
    std::vector<double> suffix_;
};

}  // namespace

DecisionResult maximize_desirability(const StatisticSet& stats, const Pi0Estimate& pi0, const CostBenefit& cb) {
    auto curve = statistic_curve(stats, pi0, cb);
    const auto chosen = argmax_desirability(curve);
    return assemble(std::move(curve), chosen, pi0, stats.tests(),
                    [&](Index i, double tau) { return stats.observed(i) >= tau; });
}

DecisionResult control_dfdr(const StatisticSet& stats, const Pi0Estimate& pi0, double alpha,
                            const CostBenefit& reporting) {
    auto curve = statistic_curve(stats, pi0, reporting);
    const auto chosen = first_controlled(curve, alpha);
    return assemble(std::move(curve), chosen, pi0, stats.tests(),
                    [&](Index i, double tau) { return stats.observed(i) >= tau; });
}

DecisionResult maximize_desirability(const PValueSet& pvalues, const Pi0Estimate& pi0, const CostBenefit& cb) {
    auto curve = pvalue_curve(pvalues, pi0, cb);
    std::vector<CurvePoint> reversed(curve.rbegin(), curve.rend());
    const auto chosen = reversed_index(argmax_desirability(reversed), curve.size());
    return assemble(std::move(curve), chosen, pi0, pvalues.tests(),
                    [&](Index i, double cutoff) { return pvalues.values(i) <= cutoff; });
}

DecisionResult control_dfdr(const PValueSet& pvalues, const Pi0Estimate& pi0, double alpha,
                            const CostBenefit& reporting) {
    auto curve = pvalue_curve(pvalues, pi0, reporting);
    std::vector<CurvePoint> reversed(curve.rbegin(), curve.rend());
    const auto chosen = reversed_index(first_controlled(reversed, alpha), curve.size());
    return assemble(std::move(curve), chosen, pi0, pvalues.tests(),
                    [&](Index i, double cutoff) { return pvalues.values(i) <= cutoff; });
}

void SubsetPartition::validate(Index features) const {
    if (subsets.empty()) throw ValidationError("partition has no subsets");
    std::set<std::string> names;
    // Coverage is tracked per comparison; the unordered group pair identifies it.
    std::map<std::pair<std::string, std::string>, std::vector<int>> covered;
    for (const auto& subset : subsets) {
        if (!names.insert(subset.name).second) throw ValidationError("duplicate subset name '" + subset.name + "'");
        if (static_cast<Index>(subset.features.size()) < min_size)
            throw ValidationError("subset '" + subset.name + "' has " + std::to_string(subset.features.size()) +
                                  " tests; at least " + std::to_string(min_size) + " are required");
        if (!(subset.cost_benefit.benefit > 0.0) || !(subset.cost_benefit.cost >= 0.0))
            throw ValidationError("subset '" + subset.name + "' needs benefit > 0 and cost >= 0");
        auto key = std::minmax(subset.group_a, subset.group_b);
        auto& seen = covered[{key.first, key.second}];
        seen.resize(static_cast<std::size_t>(features), 0);
        for (const auto f : subset.features) {
            if (f < 0 || f >= features)
                throw ValidationError("subset '" + subset.name + "' refers to feature " + std::to_string(f) +
                                      " outside the matrix");
            if (seen[static_cast<std::size_t>(f)]++)
                throw ValidationError("subset '" + subset.name + "' overlaps another subset of the same comparison");
        }
    }
    for (const auto& [comparison, seen] : covered)
        if (std::count(seen.begin(), seen.end(), 0) != 0)
            throw ValidationError("comparison " + comparison.first + " vs " + comparison.second +
                                  " leaves features outside every subset");
}

std::vector<SubsetResult> per_subset_optimize(const SubsetPartition& partition, const DataMatrix& matrix,
                                              const PermutationPlan& plan, const Pi0Choice& pi0) {
    partition.validate(matrix.features());
    std::vector<SubsetResult> results;
    for (const auto& subset : partition.subsets) {
        SubsetResult result{subset.name, {}, {}};
        const auto rows = select_features(matrix, subset.features);
        result.stats = permutation_statistics(rows, subset.group_a, subset.group_b, plan);
        result.decision = maximize_desirability(result.stats, resolve_pi0(result.stats, pi0), subset.cost_benefit);
        results.push_back(std::move(result));
    }
    return results;
}

StatisticSet pool_statistics(std::span<const StatisticSet> parts) {
    if (parts.empty()) throw ValidationError("nothing to pool");
    StatisticSet pooled;
    pooled.permutations = parts.front().permutations;
    Index m = 0;
    for (const auto& part : parts) {
        part.validate();
        if (part.permutations != pooled.permutations)
            throw ValidationError("pooled statistic sets must share the permutation count");
        m += part.tests();
    }
    pooled.observed.resize(m);
    pooled.null_stats.resize(m * pooled.permutations);
    Index offset = 0;
    for (const auto& part : parts) {
        const Index mk = part.tests();
        pooled.observed.segment(offset, mk) = part.observed;
        for (Index r = 0; r < pooled.permutations; ++r)
            pooled.null_stats.segment(r * m + offset, mk) = part.null_stats.segment(r * mk, mk);
        offset += mk;
    }
    return pooled;
}

DecisionResult common_threshold_weighted(const StatisticSet& pooled, const Eigen::VectorXd& weights,
                                         const Eigen::VectorXd& benefits, const Pi0Estimate& pi0_weighted) {
    pooled.validate();
    if (weights.size() != pooled.tests() || benefits.size() != pooled.tests())
        throw ValidationError("weights and benefits need one entry per test");
    if ((weights.array() < 0.0).any() || (benefits.array() < 0.0).any())
        throw ValidationError("weights and benefits must be nonnegative");
    if (weights.sum() == 0.0) throw ValidationError("all weights are zero");

    const WeightedTail observed_w(pooled.observed, weights);
    const WeightedTail observed_b(pooled.observed, benefits);
    const WeightedTail nulls_w(pooled.null_stats, null_weights(pooled, weights));
    const ExceedanceCounter observed(pooled.observed);
    const auto m = static_cast<double>(pooled.tests());
    const auto total_null = static_cast<double>(pooled.null_stats.size());

    std::vector<CurvePoint> curve;
    for (const double tau : observed.distinct()) {
        CurvePoint point{tau, 0.0, 0.0, observed.at_least(tau)};
        const double rejected_mass = observed_w.mass_at_least(tau);
        if (rejected_mass > 0.0)
            point.dfdr = pi0_weighted.value * (nulls_w.mass_at_least(tau) / total_null) / (rejected_mass / m);
        point.desirability = observed_b.mass_at_least(tau) - point.dfdr * rejected_mass;
        curve.push_back(point);
    }
    const auto chosen = argmax_desirability(curve);
    return assemble(std::move(curve), chosen, pi0_weighted, pooled.tests(),
                    [&](Index i, double tau) { return pooled.observed(i) >= tau; });
}

}  // namespace dfdr
