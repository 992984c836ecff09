#include "dfdr/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/distributions/non_central_t.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "dfdr/error.hpp"
#include "dfdr/random.hpp"
#include "dfdr/resampling.hpp"

namespace dfdr {

namespace {

constexpr std::uint64_t kTruthStream = 0x7275746800000000ULL;
constexpr std::uint64_t kPermutationStream = 0x7065726d00000000ULL;

double effective_pi0(const SimulationConfig& config) {
    if (config.truth == TruthMode::fixed)
        return std::floor(config.pi0 * static_cast<double>(config.tests)) / static_cast<double>(config.tests);
    return config.pi0;
}

double mean_of(const std::vector<double>& xs) {
    double sum = 0.0;
    for (const double x : xs) sum += x;
    return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
}

double standard_error(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double mean = mean_of(xs);
    double ss = 0.0;
    for (const double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
}

DecisionResult reject_at(const StatisticSet& stats, const Pi0Estimate& pi0, double tau) {
    DecisionResult result;
    result.pi0 = pi0;
    result.tau = tau;
    const auto estimate = estimate_dfdr_at_tau(stats, pi0, tau);
    result.dfdr = estimate.value;
    const CostBenefit cb;
    result.desirability = cb.benefit * (1.0 - (1.0 + cb.ratio()) * estimate.value) *
                          static_cast<double>(estimate.discoveries);
    for (Index i = 0; i < stats.tests(); ++i)
        if (stats.observed(i) >= tau) result.rejected.push_back(i);
    return result;
}

ErrorRateReport summarize(std::string name, std::vector<ReplicateOutcome> outcomes) {
    ErrorRateReport report;
    report.rule = std::move(name);
    report.replicates = static_cast<Index>(outcomes.size());
    std::vector<double> fdp, fdp_given_rejection, estimated, pi0s;
    for (const auto& o : outcomes) {
        report.total_rejections += o.rejections;
        report.total_false_rejections += o.false_rejections;
        const double proportion =
            o.rejections > 0 ? static_cast<double>(o.false_rejections) / static_cast<double>(o.rejections) : 0.0;
        fdp.push_back(proportion);
        if (o.rejections > 0) {
            ++report.replicates_with_rejections;
            fdp_given_rejection.push_back(proportion);
        }
        estimated.push_back(o.estimated_dfdr);
        pi0s.push_back(o.pi0);
    }
    report.fdr = mean_of(fdp);
    report.fdr_se = standard_error(fdp);
    if (!fdp_given_rejection.empty()) {
        report.pfdr = mean_of(fdp_given_rejection);
        report.pfdr_se = standard_error(fdp_given_rejection);
    }
    if (report.total_rejections > 0) {
        const double ratio = static_cast<double>(report.total_false_rejections) /
                             static_cast<double>(report.total_rejections);
        report.pfp = ratio;
        report.dfdr = ratio;
        report.dfdr_binomial_se = std::sqrt(ratio * (1.0 - ratio) / static_cast<double>(report.total_rejections));
    }
    report.conditional_probability = report.dfdr;
    report.mean_estimated_dfdr = mean_of(estimated);
    report.estimated_dfdr_se = standard_error(estimated);
    report.mean_pi0 = mean_of(pi0s);
    report.outcomes = std::move(outcomes);
    return report;
}

}  // namespace

void SimulationConfig::validate() const {
    if (tests < 1) throw UsageError("simulation needs at least one test");
    if (!(pi0 >= 0.0 && pi0 <= 1.0)) throw UsageError("pi0 must lie in [0, 1]");
    if (replicates < 1) throw UsageError("replicates must be at least 1");
    if (group_a_size < 2 || group_b_size < 2) throw UsageError("each group needs at least two subjects");
    if (!std::isfinite(effect)) throw UsageError("effect must be finite");
    if (permutations < 1) throw UsageError("permutation count must be at least 1");
    if (!(correlation >= 0.0 && correlation < 1.0)) throw UsageError("correlation must lie in [0, 1)");
    if (block_size < 1) throw UsageError("block size must be at least 1");
}

Instance generate_instance(const SimulationConfig& config, Index replicate) {
    config.validate();
    const Index m = config.tests;
    const Index n = config.group_a_size + config.group_b_size;
    Instance instance;
    instance.alternative.assign(static_cast<std::size_t>(m), 0);

    Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(replicate)));
    if (config.truth == TruthMode::fixed) {
        Rng truth_rng(mix_seed(config.seed, kTruthStream));
        const auto order = truth_rng.permutation(m);
        const auto nulls = static_cast<Index>(std::floor(config.pi0 * static_cast<double>(m)));
        for (Index k = nulls; k < m; ++k) instance.alternative[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = 1;
    } else {
        for (auto& h : instance.alternative) h = rng.bernoulli(1.0 - config.pi0) ? 1 : 0;
    }

    auto& matrix = instance.matrix;
    matrix.values.resize(m, n);
    const double shared = std::sqrt(config.correlation);
    const double own = std::sqrt(1.0 - config.correlation);
    Eigen::VectorXd factor(n);
    for (Index i = 0; i < m; ++i) {
        if (config.correlation > 0.0 && i % config.block_size == 0)
            for (Index j = 0; j < n; ++j) factor(j) = rng.normal();
        for (Index j = 0; j < n; ++j) {
            double x = rng.normal();
            if (config.correlation > 0.0) x = shared * factor(j) + own * x;
            if (instance.alternative[static_cast<std::size_t>(i)] && j < config.group_a_size) x += config.effect;
            matrix.values(i, j) = x;
        }
    }
    for (Index i = 0; i < m; ++i) matrix.feature_ids.push_back("f" + std::to_string(i));
    for (Index j = 0; j < n; ++j) {
        matrix.subject_ids.push_back("s" + std::to_string(j));
        matrix.labels.push_back(j < config.group_a_size ? "A" : "B");
    }
    return instance;
}

NamedRule maximize_rule(const CostBenefit& cb, const Pi0Choice& pi0) {
    return {"maximize", [cb, pi0](const StatisticSet& stats) {
                return maximize_desirability(stats, resolve_pi0(stats, pi0), cb);
            }};
}

NamedRule control_rule(double alpha, const Pi0Choice& pi0) {
    return {"control", [alpha, pi0](const StatisticSet& stats) {
                return control_dfdr(stats, resolve_pi0(stats, pi0), alpha);
            }};
}

NamedRule threshold_rule(double tau, const Pi0Choice& pi0) {
    return {"threshold", [tau, pi0](const StatisticSet& stats) { return reject_at(stats, resolve_pi0(stats, pi0), tau); }};
}

NamedRule reject_nothing_rule() {
    return {"reject-nothing", [](const StatisticSet&) { return DecisionResult{}; }};
}

NamedRule reject_all_rule() {
    return {"reject-all", [](const StatisticSet& stats) {
                return reject_at(stats, Pi0Estimate::one(), -std::numeric_limits<double>::infinity());
            }};
}

std::vector<ErrorRateReport> measure_error_rates(const SimulationConfig& config, std::span<const NamedRule> rules) {
    config.validate();
    std::vector<std::vector<ReplicateOutcome>> outcomes(rules.size());
    for (Index r = 0; r < config.replicates; ++r) {
        const auto instance = generate_instance(config, r);
        const PermutationPlan plan{config.permutations,
                                   mix_seed(mix_seed(config.seed, static_cast<std::uint64_t>(r)), kPermutationStream)};
        const auto stats = permutation_statistics(instance.matrix, "A", "B", plan);
        for (std::size_t k = 0; k < rules.size(); ++k) {
            const auto decision = rules[k].decide(stats);
            ReplicateOutcome outcome;
            outcome.tau = decision.tau;
            outcome.rejections = decision.discoveries();
            outcome.estimated_dfdr = decision.dfdr;
            outcome.pi0 = decision.pi0.value;
            for (const auto i : decision.rejected) {
                const bool is_null = instance.alternative[static_cast<std::size_t>(i)] == 0;
                outcome.false_rejections += is_null ? 1 : 0;
                outcome.rejected_stats.push_back(stats.observed(i));
                outcome.rejected_is_null.push_back(is_null ? 1 : 0);
            }
            outcomes[k].push_back(std::move(outcome));
        }
    }
    std::vector<ErrorRateReport> reports;
    for (std::size_t k = 0; k < rules.size(); ++k) reports.push_back(summarize(rules[k].name, std::move(outcomes[k])));
    return reports;
}

ErrorRateReport measure_error_rates(const SimulationConfig& config, const NamedRule& rule) {
    return std::move(measure_error_rates(config, std::span<const NamedRule>(&rule, 1)).front());
}

std::vector<LocalRate> measure_local_dfdr(const ErrorRateReport& report, std::span<const LocalBin> bins) {
    for (std::size_t k = 0; k < bins.size(); ++k) {
        if (!(bins[k].lower >= 0.0) || !(bins[k].upper > bins[k].lower))
            throw UsageError("bins must satisfy 0 <= lower < upper");
        for (std::size_t j = 0; j < k; ++j)
            if (bins[k].lower < bins[j].upper && bins[j].lower < bins[k].upper)
                throw UsageError("bins overlap");
    }
    std::vector<LocalRate> rates;
    for (const auto& bin : bins) {
        LocalRate rate{bin, 0, 0, 0.0, 0.0};
        for (const auto& o : report.outcomes) {
            if (!o.tau) continue;
            for (std::size_t k = 0; k < o.rejected_stats.size(); ++k) {
                const double offset = o.rejected_stats[k] - *o.tau;
                if (offset >= bin.lower && offset < bin.upper) {
                    ++rate.rejections;
                    rate.false_rejections += o.rejected_is_null[k];
                }
            }
        }
        if (rate.rejections > 0) {
            rate.rate = static_cast<double>(rate.false_rejections) / static_cast<double>(rate.rejections);
            rate.binomial_se = std::sqrt(rate.rate * (1.0 - rate.rate) / static_cast<double>(rate.rejections));
        }
        rates.push_back(rate);
    }
    return rates;
}

LocalBin boundary_bin(const ErrorRateReport& report, double share) {
    std::vector<double> offsets;
    for (const auto& o : report.outcomes)
        if (o.tau)
            for (const double t : o.rejected_stats) offsets.push_back(t - *o.tau);
    if (offsets.empty()) return {0.0, std::numeric_limits<double>::min()};
    std::sort(offsets.begin(), offsets.end());
    const auto need = static_cast<std::size_t>(std::ceil(share * static_cast<double>(offsets.size())));
    const std::size_t k = std::clamp<std::size_t>(need, 1, offsets.size()) - 1;
    return {0.0, std::nextafter(offsets[k], std::numeric_limits<double>::infinity())};
}

double null_tail(const SimulationConfig& config, double tau) {
    if (config.group_a_size != config.group_b_size)
        throw UsageError("closed-form tails need equal group sizes");
    if (tau <= 0.0) return 1.0;
    const boost::math::students_t t(static_cast<double>(2 * config.group_a_size - 2));
    return 2.0 * boost::math::cdf(boost::math::complement(t, tau));
}

double alternative_tail(const SimulationConfig& config, double tau) {
    if (config.group_a_size != config.group_b_size)
        throw UsageError("closed-form tails need equal group sizes");
    if (tau <= 0.0) return 1.0;
    const auto n = static_cast<double>(config.group_a_size);
    const double shift = config.effect / std::sqrt(2.0 / n);
    const boost::math::non_central_t t(2.0 * n - 2.0, shift);
    return boost::math::cdf(boost::math::complement(t, tau)) + boost::math::cdf(t, -tau);
}

double analytic_dfdr(const SimulationConfig& config, double tau) {
    const double pi0 = effective_pi0(config);
    const double false_mass = pi0 * null_tail(config, tau);
    const double total = false_mass + (1.0 - pi0) * alternative_tail(config, tau);
    return total > 0.0 ? false_mass / total : 0.0;
}

}  // namespace dfdr
