#include "dfdr/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "dfdr/data.hpp"
#include "dfdr/decision.hpp"
#include "dfdr/error.hpp"
#include "dfdr/resampling.hpp"

namespace dfdr::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kGolubGuidance =
    "The Golub et al. (1999) leukemia data are public but not bundled. Download the training and test\n"
    "'average difference' tables (e.g. data_set_ALL_AML_train.csv / data_set_ALL_AML_independent.csv,\n"
    "widely mirrored), merge them into one TSV with a header row of subject IDs and one row per gene\n"
    "(7129 rows), and write a two-column labels TSV tagging each subject ALL (B-cell), TALL or AML.\n"
    "Then run: dfdr reproduce --matrix golub.tsv --labels golub_labels.tsv [--t-group TALL]";

using KeyValues = std::vector<std::pair<std::string, std::string>>;

std::string pi0_mode_name(Pi0Mode mode) {
    switch (mode) {
        case Pi0Mode::estimated: return "estimated";
        case Pi0Mode::user_supplied: return "user-supplied";
        case Pi0Mode::fixed_one: break;
    }
    return "fixed-one";
}

std::string tau_text(const std::optional<double>& tau) { return tau ? format_number(*tau) : "none"; }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (const char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

void write_decision(const fs::path& dir, const std::vector<std::string>& ids, const Eigen::VectorXd& values,
                    const std::string& value_column, const DecisionResult& decision, const KeyValues& summary) {
    fs::create_directories(dir);

    std::vector<char> rejected(ids.size(), 0);
    for (const auto i : decision.rejected) rejected[static_cast<std::size_t>(i)] = 1;
    std::string tests = "feature_id," + value_column + ",rejected\n";
    for (std::size_t i = 0; i < ids.size(); ++i)
        tests += fmt::format("{},{},{}\n", csv_field(ids[i]), format_number(values(static_cast<Index>(i))),
                             rejected[i] ? 1 : 0);
    write_atomically(dir / "tests.csv", tests);

    std::string curve = "tau,desirability,dfdr,discoveries\n";
    for (const auto& p : decision.curve)
        curve += fmt::format("{},{},{},{}\n", format_number(p.tau), format_number(p.desirability),
                             format_number(p.dfdr), p.discoveries);
    write_atomically(dir / "curve.csv", curve);

    std::string text;
    for (const auto& [key, value] : summary) text += key + "=" + value + "\n";
    write_atomically(dir / "summary.txt", text);
}

KeyValues decision_summary(const DecisionResult& decision) {
    return {{"tau", tau_text(decision.tau)},
            {"discoveries", std::to_string(decision.discoveries())},
            {"dfdr", format_number(decision.dfdr)},
            {"desirability", format_number(decision.desirability)},
            {"pi0", format_number(decision.pi0.value)},
            {"pi0_mode", pi0_mode_name(decision.pi0.mode)},
            {"lambda", format_number(decision.pi0.lambda)}};
}

KeyValues run_summary(const RunConfig& config, Index tests, bool resampled) {
    KeyValues kv{{"mode", config.mode == Mode::control ? "control" : "maximize"}, {"tests", std::to_string(tests)}};
    const auto cb = config.cost_benefit();
    kv.emplace_back("benefit", format_number(cb.benefit));
    kv.emplace_back("cost", format_number(cb.cost));
    kv.emplace_back("cost_ratio", format_number(cb.ratio()));
    kv.emplace_back("p_threshold", format_number(cb.probability_threshold()));
    if (config.mode == Mode::control) kv.emplace_back("alpha", format_number(config.alpha));
    if (resampled) {
        kv.emplace_back("permutations", std::to_string(config.permutations));
        kv.emplace_back("seed", std::to_string(config.seed));
    }
    return kv;
}

KeyValues concat(KeyValues a, const KeyValues& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

DecisionResult decide(const RunConfig& config, const StatisticSet& stats, const Pi0Estimate& pi0) {
    if (config.mode == Mode::control) return control_dfdr(stats, pi0, config.alpha, config.cost_benefit());
    return maximize_desirability(stats, pi0, config.cost_benefit());
}

std::vector<std::string> numbered_ids(Index m) {
    std::vector<std::string> ids;
    for (Index i = 1; i <= m; ++i) ids.push_back(std::to_string(i));
    return ids;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream in(s);
    std::string part;
    while (std::getline(in, part, sep)) parts.push_back(part);
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

double parse_double(const std::string& text, const fs::path& file, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw ParseError(file.string() + ": '" + text + "' is not a number", line);
}

std::vector<std::vector<std::string>> read_tsv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') {
            rows.emplace_back();
            continue;
        }
        rows.push_back(split(line, '\t'));
    }
    return rows;
}

Index feature_index(const DataMatrix& matrix, const std::string& id) {
    for (std::size_t i = 0; i < matrix.feature_ids.size(); ++i)
        if (matrix.feature_ids[i] == id) return static_cast<Index>(i);
    throw ValidationError("unknown feature ID '" + id + "'");
}

// name, group_a, group_b, benefit, cost [, comma-separated feature IDs]
SubsetPartition read_subsets(const fs::path& path, const DataMatrix& matrix, Index min_size) {
    SubsetPartition partition;
    partition.min_size = min_size;
    const auto rows = read_tsv(path);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.empty()) continue;
        if (row.size() != 5 && row.size() != 6)
            throw ParseError("subset rows need name, group_a, group_b, benefit, cost [, features]", r + 1);
        Subset subset;
        subset.name = row[0];
        subset.group_a = row[1];
        subset.group_b = row[2];
        subset.cost_benefit = {parse_double(row[3], path, r + 1), parse_double(row[4], path, r + 1)};
        if (row.size() == 6) {
            for (const auto& id : split(row[5], ',')) subset.features.push_back(feature_index(matrix, id));
        } else {
            for (Index i = 0; i < matrix.features(); ++i) subset.features.push_back(i);
        }
        partition.subsets.push_back(std::move(subset));
    }
    return partition;
}

// feature_id, benefit, cost for every feature
void read_weights(const fs::path& path, const DataMatrix& matrix, Eigen::VectorXd& benefits, Eigen::VectorXd& costs) {
    benefits = Eigen::VectorXd::Constant(matrix.features(), std::numeric_limits<double>::quiet_NaN());
    costs = benefits;
    const auto rows = read_tsv(path);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.empty()) continue;
        if (row.size() != 3) throw ParseError("weight rows need feature_id, benefit, cost", r + 1);
        const auto i = feature_index(matrix, row[0]);
        benefits(i) = parse_double(row[1], path, r + 1);
        costs(i) = parse_double(row[2], path, r + 1);
    }
    for (Index i = 0; i < matrix.features(); ++i)
        if (std::isnan(benefits(i)))
            throw ValidationError("no weights for feature '" + matrix.feature_ids[static_cast<std::size_t>(i)] + "'");
}

Pi0Estimate weighted_pi0(const RunConfig& config, const StatisticSet& stats, const Eigen::VectorXd& weights) {
    if (config.pi0.mode == Pi0Mode::estimated) return estimate_weighted_pi0(stats, weights);
    return resolve_pi0(stats, config.pi0);
}

void analyze_subsets(const RunConfig& config, const DataMatrix& matrix) {
    const auto partition = read_subsets(config.subsets, matrix, config.min_subset_size);
    const PermutationPlan plan{config.permutations, config.seed};
    const auto results = per_subset_optimize(partition, matrix, plan, config.pi0);

    std::vector<StatisticSet> parts;
    std::vector<std::string> pooled_ids;
    std::vector<double> benefit_list, weight_list;
    std::string index;
    for (std::size_t k = 0; k < results.size(); ++k) {
        const auto& subset = partition.subsets[k];
        const auto& result = results[k];
        std::vector<std::string> ids;
        for (const auto f : subset.features) ids.push_back(matrix.feature_ids[static_cast<std::size_t>(f)]);
        KeyValues kv{{"subset", subset.name},
                     {"group_a", subset.group_a},
                     {"group_b", subset.group_b},
                     {"tests", std::to_string(result.stats.tests())},
                     {"benefit", format_number(subset.cost_benefit.benefit)},
                     {"cost", format_number(subset.cost_benefit.cost)}};
        kv = concat(kv, decision_summary(result.decision));
        kv.emplace_back("permutations", std::to_string(config.permutations));
        kv.emplace_back("seed", std::to_string(config.seed));
        write_decision(config.out / subset.name, ids, result.stats.observed, "statistic", result.decision, kv);
        index += fmt::format("{}\t{}\t{}\t{}\n", subset.name, tau_text(result.decision.tau),
                             result.decision.discoveries(), format_number(result.decision.dfdr));

        parts.push_back(result.stats);
        for (const auto& id : ids) {
            pooled_ids.push_back(subset.name + ":" + id);
            benefit_list.push_back(subset.cost_benefit.benefit);
            weight_list.push_back(subset.cost_benefit.benefit + subset.cost_benefit.cost);
        }
    }
    const auto pooled = pool_statistics(parts);
    const Eigen::VectorXd weights = Eigen::Map<const Eigen::VectorXd>(weight_list.data(), static_cast<Index>(weight_list.size()));
    const Eigen::VectorXd benefits = Eigen::Map<const Eigen::VectorXd>(benefit_list.data(), static_cast<Index>(benefit_list.size()));
    const auto common = common_threshold_weighted(pooled, weights, benefits, weighted_pi0(config, pooled, weights));
    KeyValues kv{{"subset", "common"}, {"tests", std::to_string(pooled.tests())}};
    kv = concat(kv, decision_summary(common));
    kv.emplace_back("permutations", std::to_string(config.permutations));
    kv.emplace_back("seed", std::to_string(config.seed));
    write_decision(config.out / "common", pooled_ids, pooled.observed, "statistic", common, kv);
    index += fmt::format("common\t{}\t{}\t{}\n", tau_text(common.tau), common.discoveries(), format_number(common.dfdr));
    write_atomically(config.out / "subsets.tsv", "subset\ttau\tdiscoveries\tdfdr\n" + index);
}

struct TableColumn {
    const char* name;
    Mode mode;
    bool pi0_one;
    double tau, discoveries, desirability_est, desirability_one, dfdr_est, dfdr_one;
};

// Published values for the ALL vs AML comparison.
constexpr TableColumn kPublished[] = {
    {"max D, pi0 est", Mode::maximize, false, 3.14, 910, 683, 524, 0.0125, 0.0212},
    {"max D, pi0 = 1", Mode::maximize, true, 3.37, 768, 656, 578, 0.0073, 0.0124},
    {"dFDR <= 5%, pi0 est", Mode::control, false, 2.44, 1496, 1.4, -1043, 0.0500, 0.0849},
    {"dFDR <= 5%, pi0 = 1", Mode::control, true, 2.73, 1212, 500, 2.3, 0.0294, 0.0499},
};

}  // namespace

std::string format_number(double value) { return fmt::format("{}", value); }

CostBenefit RunConfig::cost_benefit() const {
    if (cost_ratio) return CostBenefit::from_ratio(*cost_ratio);
    return CostBenefit::from_probability(p_threshold.value_or(0.05));
}

void RunConfig::validate() const {
    if (cost_ratio && p_threshold) throw UsageError("--cost-ratio and --p-threshold are mutually exclusive");
    if (p_threshold && !(*p_threshold > 0.0 && *p_threshold <= 1.0))
        throw UsageError("--p-threshold must lie in (0, 1]");
    if (cost_ratio && !(*cost_ratio >= 0.0)) throw UsageError("--cost-ratio must be nonnegative");
    if (mode == Mode::control && !(alpha > 0.0 && alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
    if (permutations < 1) throw UsageError("--permutations must be at least 1");
    if (pi0.mode == Pi0Mode::user_supplied && !(pi0.value >= 0.0 && pi0.value <= 1.0))
        throw UsageError("--pi0 value must lie in [0, 1]");
    if (command == "analyze") {
        const int inputs = (!matrix.empty() ? 1 : 0) + (!pvalues.empty() ? 1 : 0) + (!observed.empty() ? 1 : 0);
        if (inputs != 1) throw UsageError("analyze needs exactly one of --matrix, --pvalues or --observed");
        if (!matrix.empty() && labels.empty()) throw UsageError("--matrix requires --labels");
        if (!observed.empty() && null_stats.empty()) throw UsageError("--observed requires --null");
        if ((!subsets.empty() || !weights.empty()) && matrix.empty())
            throw UsageError("--subsets and --weights require --matrix");
        if (!subsets.empty() && !weights.empty()) throw UsageError("--subsets and --weights are mutually exclusive");
        if (!subsets.empty() && mode != Mode::maximize) throw UsageError("--subsets requires --mode maximize");
        if (!weights.empty() && mode != Mode::maximize) throw UsageError("--weights requires --mode maximize");
        if (mode == Mode::none) throw UsageError("analyze supports --mode maximize or control");
        if (out.empty()) throw UsageError("--out is required");
    }
    if (command == "simulate") {
        simulation.validate();
        if (out.empty()) throw UsageError("--out is required");
    }
}

std::vector<double> read_column(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        values.push_back(parse_double(line, path, line_no));
    }
    return values;
}

void write_atomically(const fs::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << contents;
        if (!out.flush()) throw Error("cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
}

void run_analyze(const RunConfig& config) {
    config.validate();
    if (!config.pvalues.empty()) {
        const auto raw = read_column(config.pvalues);
        const auto pvalues = validate_pvalues(raw);
        const Pi0Estimate pi0 = config.pi0.mode == Pi0Mode::estimated    ? estimate_pvalue_pi0(pvalues)
                                : config.pi0.mode == Pi0Mode::fixed_one ? Pi0Estimate::one()
                                                                        : Pi0Estimate::supplied(config.pi0.value);
        const auto decision = config.mode == Mode::control
                                  ? control_dfdr(pvalues, pi0, config.alpha, config.cost_benefit())
                                  : maximize_desirability(pvalues, pi0, config.cost_benefit());
        write_decision(config.out, numbered_ids(pvalues.tests()), pvalues.values, "p_value", decision,
                       concat(run_summary(config, pvalues.tests(), false), decision_summary(decision)));
        return;
    }

    if (!config.observed.empty()) {
        const auto observed = read_column(config.observed);
        const auto nulls = read_column(config.null_stats);
        StatisticSet stats;
        stats.observed = Eigen::Map<const Eigen::VectorXd>(observed.data(), static_cast<Index>(observed.size()));
        stats.null_stats = Eigen::Map<const Eigen::VectorXd>(nulls.data(), static_cast<Index>(nulls.size()));
        if (observed.empty() || nulls.size() % observed.size() != 0)
            throw ValidationError("null statistic count must be a positive multiple of the observed count");
        stats.permutations = static_cast<Index>(nulls.size() / observed.size());
        stats.validate();
        const auto decision = decide(config, stats, resolve_pi0(stats, config.pi0));
        auto kv = concat(run_summary(config, stats.tests(), false), decision_summary(decision));
        kv.emplace_back("permutations", std::to_string(stats.permutations));
        write_decision(config.out, numbered_ids(stats.tests()), stats.observed, "statistic", decision, kv);
        return;
    }

    auto matrix = load_matrix(config.matrix, config.labels);
    if (config.preprocess) matrix = preprocess(std::move(matrix));
    if (!config.subsets.empty()) return analyze_subsets(config, matrix);

    const auto stats = permutation_statistics(matrix, config.group_a, config.group_b,
                                              PermutationPlan{config.permutations, config.seed});
    if (!config.weights.empty()) {
        Eigen::VectorXd benefits, costs;
        read_weights(config.weights, matrix, benefits, costs);
        const Eigen::VectorXd weights = benefits + costs;
        const auto decision = common_threshold_weighted(stats, weights, benefits, weighted_pi0(config, stats, weights));
        KeyValues kv{{"mode", "weighted"}, {"tests", std::to_string(stats.tests())}};
        kv = concat(kv, decision_summary(decision));
        kv.emplace_back("permutations", std::to_string(config.permutations));
        kv.emplace_back("seed", std::to_string(config.seed));
        write_decision(config.out, matrix.feature_ids, stats.observed, "statistic", decision, kv);
        return;
    }
    const auto decision = decide(config, stats, resolve_pi0(stats, config.pi0));
    write_decision(config.out, matrix.feature_ids, stats.observed, "statistic", decision,
                   concat(run_summary(config, stats.tests(), true), decision_summary(decision)));
}

bool run_simulate(const RunConfig& config, std::ostream& out) {
    config.validate();
    const auto& sim = config.simulation;
    NamedRule rule = reject_nothing_rule();
    if (config.mode == Mode::maximize) rule = maximize_rule(config.cost_benefit(), config.pi0);
    if (config.mode == Mode::control) rule = control_rule(config.alpha, config.pi0);
    const auto report = measure_error_rates(sim, rule);

    std::string text;
    const auto record = [&](const std::string& metric, const std::string& value, const std::string& se) {
        text += fmt::format("rule={} metric={} value={} se={}\n", report.rule, metric, value, se);
    };
    record("replicates", std::to_string(report.replicates), "0");
    record("total_rejections", std::to_string(report.total_rejections), "0");
    record("total_false_rejections", std::to_string(report.total_false_rejections), "0");
    record("fdr", format_number(report.fdr), format_number(report.fdr_se));
    record("pfdr", report.pfdr ? format_number(*report.pfdr) : "undefined", format_number(report.pfdr_se));
    record("pfp", report.pfp ? format_number(*report.pfp) : "undefined", format_number(report.dfdr_binomial_se));
    record("dfdr", format_number(report.dfdr), format_number(report.dfdr_binomial_se));
    record("conditional_probability", format_number(report.conditional_probability),
           format_number(report.dfdr_binomial_se));
    record("mean_estimated_dfdr", format_number(report.mean_estimated_dfdr), format_number(report.estimated_dfdr_se));
    record("mean_pi0", format_number(report.mean_pi0), "0");

    bool all_pass = true;
    const auto verdict = [&](const std::string& check, double value, double limit) {
        const bool pass = value <= limit;
        all_pass = all_pass && pass;
        text += fmt::format("rule={} check={} value={} limit={} verdict={}\n", report.rule, check,
                            format_number(value), format_number(limit), pass ? "PASS" : "FAIL");
    };
    if (config.mode != Mode::none) {
        const double bound = config.mode == Mode::maximize ? config.cost_benefit().probability_threshold() : config.alpha;
        verdict(config.mode == Mode::maximize ? "conditional_probability_bound" : "dfdr_control_bound",
                report.conditional_probability, bound + 3.0 * report.dfdr_binomial_se);
        if (config.mode == Mode::maximize && report.total_rejections > 0) {
            const LocalBin bins[] = {boundary_bin(report)};
            const auto local = measure_local_dfdr(report, bins).front();
            record("boundary_bin_upper", format_number(local.bin.upper), "0");
            verdict("local_boundary_bound", local.rate, bound + 3.0 * local.binomial_se);
        }
    }
    fs::create_directories(config.out);
    write_atomically(config.out / "report.txt", text);
    out << text;
    return all_pass;
}

void run_reproduce(const RunConfig& config, std::ostream& out) {
    if (config.matrix.empty() || config.labels.empty() || !fs::exists(config.matrix) || !fs::exists(config.labels))
        throw ParseError(std::string("Golub data files not found.\n") + kGolubGuidance);
    const auto matrix = preprocess(load_matrix(config.matrix, config.labels));
    const PermutationPlan plan{config.permutations, config.seed};
    const auto stats = permutation_statistics(matrix, config.group_a, config.group_b, plan);
    const auto pi0_est = estimate_pi0(stats);
    const auto pi0_one = Pi0Estimate::one();
    const CostBenefit cb = CostBenefit::from_probability(0.05);

    std::string text = fmt::format("{} vs {}: m = {}, B = {}, seed = {}, pi0 estimate = {:.4f} (published ~0.59), "
                                   "lambda = {:.4f}\n\n",
                                   config.group_a, config.group_b, stats.tests(), plan.permutations, plan.seed,
                                   pi0_est.value, pi0_est.lambda);
    text += fmt::format("{:<22}{:>16}{:>12}{:>12}{:>12}{:>12}{:>12}\n", "column", "quantity", "computed", "published",
                        "deviation", "", "");
    for (const auto& column : kPublished) {
        const auto& pi0 = column.pi0_one ? pi0_one : pi0_est;
        const auto decision = column.mode == Mode::maximize ? maximize_desirability(stats, pi0, cb)
                                                            : control_dfdr(stats, pi0, 0.05, cb);
        const double tau = decision.tau.value_or(std::numeric_limits<double>::infinity());
        const auto row = [&](const char* quantity, double computed, double published) {
            text += fmt::format("{:<22}{:>16}{:>12.4f}{:>12.4f}{:>+12.4f}\n", column.name, quantity, computed,
                                published, computed - published);
        };
        row("tau", tau, column.tau);
        row("discoveries", static_cast<double>(decision.discoveries()), column.discoveries);
        row("D(pi0 est)", estimate_desirability(stats, pi0_est, cb, tau), column.desirability_est);
        row("D(pi0 = 1)", estimate_desirability(stats, pi0_one, cb, tau), column.desirability_one);
        row("dFDR(pi0 est)", estimate_dfdr_at_tau(stats, pi0_est, tau).value, column.dfdr_est);
        row("dFDR(pi0 = 1)", estimate_dfdr_at_tau(stats, pi0_one, tau).value, column.dfdr_one);
    }

    if (!config.t_group.empty()) {
        SubsetPartition partition;
        std::vector<Index> all(static_cast<std::size_t>(matrix.features()));
        for (Index i = 0; i < matrix.features(); ++i) all[static_cast<std::size_t>(i)] = i;
        partition.subsets.push_back({"aml", all, config.group_a, config.group_b, {1.0, 19.0}});
        partition.subsets.push_back({"tall", all, config.group_a, config.t_group, {2.0, 19.0}});
        const auto results = per_subset_optimize(partition, matrix, plan);
        const auto& second = results[1].decision;
        text += fmt::format("\n{} vs {} (benefit 2, cost 19): tau = {:.4f} (published 3.64), discoveries = {} "
                            "(published 350), dFDR = {:.4f} (published 0.0418)\n",
                            config.group_a, config.t_group,
                            second.tau.value_or(std::numeric_limits<double>::infinity()), second.discoveries(),
                            second.dfdr);
        const auto& first = results[0].decision;
        text += fmt::format("{} vs {} (benefit 1, cost 19): tau = {:.4f} (published 3.14), discoveries = {} "
                            "(published 910), dFDR = {:.4f} (published 0.0125)\n",
                            config.group_a, config.group_b,
                            first.tau.value_or(std::numeric_limits<double>::infinity()), first.discoveries(),
                            first.dfdr);
    }
    out << text;
    if (!config.out.empty()) {
        fs::create_directories(config.out);
        write_atomically(config.out / "reproduce.txt", text);
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig config;
    std::string mode = "maximize";
    std::string pi0 = "estimate";
    std::string truth = "fixed";
    Index sim_permutations = config.simulation.permutations;

    CLI::App app{"Decisive false discovery rate estimation and desirability-optimal thresholds"};
    app.require_subcommand(1);

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--mode", mode, "maximize | control");
        auto* ratio = sub->add_option("--cost-ratio", config.cost_ratio, "cost-to-benefit ratio c/b");
        auto* p = sub->add_option("--p-threshold", config.p_threshold, "probability threshold p, c/b = 1/p - 1");
        ratio->excludes(p);
        sub->add_option("--alpha", config.alpha, "dFDR level for --mode control")->capture_default_str();
        sub->add_option("--seed", config.seed, "random seed")->capture_default_str();
        sub->add_option("--pi0", pi0, "estimate | one | <value in [0,1]>")->capture_default_str();
        sub->add_option("--out", config.out, "output directory");
    };

    auto* analyze = app.add_subcommand("analyze", "choose a rejection threshold for observed data");
    add_common(analyze);
    analyze->get_option("--mode")->check(CLI::IsMember({"maximize", "control"}));
    analyze->add_option("--matrix", config.matrix, "feature x subject TSV");
    analyze->add_option("--labels", config.labels, "subject -> group TSV");
    analyze->add_option("--group-a", config.group_a)->capture_default_str();
    analyze->add_option("--group-b", config.group_b)->capture_default_str();
    analyze->add_option("--pvalues", config.pvalues, "one p-value per line");
    analyze->add_option("--observed", config.observed, "one observed statistic per line");
    analyze->add_option("--null", config.null_stats, "m * B null statistics, permutation-major");
    analyze->add_option("--permutations", config.permutations)->capture_default_str();
    analyze->add_flag("--preprocess", config.preprocess, "median-normalize and log-transform the matrix");
    analyze->add_option("--subsets", config.subsets, "TSV: name, group_a, group_b, benefit, cost [, features]");
    analyze->add_option("--weights", config.weights, "TSV: feature_id, benefit, cost");
    analyze->add_option("--min-subset-size", config.min_subset_size)->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "measure realized error rates on synthetic data");
    add_common(simulate);
    simulate->get_option("--mode")->description("maximize | control | none")->check(CLI::IsMember({"maximize", "control", "none"}));
    auto& sim = config.simulation;
    simulate->add_option("--tests", sim.tests)->capture_default_str();
    simulate->add_option("--pi0-true", sim.pi0)->capture_default_str();
    simulate->add_option("--replicates", sim.replicates)->capture_default_str();
    simulate->add_option("--group-a-size", sim.group_a_size)->capture_default_str();
    simulate->add_option("--group-b-size", sim.group_b_size)->capture_default_str();
    simulate->add_option("--effect", sim.effect)->capture_default_str();
    simulate->add_option("--permutations", sim_permutations)->capture_default_str();
    simulate->add_option("--truth", truth, "fixed | mixture")->check(CLI::IsMember({"fixed", "mixture"}));
    simulate->add_option("--correlation", sim.correlation)->capture_default_str();
    simulate->add_option("--block-size", sim.block_size)->capture_default_str();

    auto* reproduce = app.add_subcommand("reproduce", "recompute the ALL/AML comparison table");
    reproduce->add_option("--matrix", config.matrix, "Golub AD matrix TSV");
    reproduce->add_option("--labels", config.labels, "subject -> group TSV");
    reproduce->add_option("--group-a", config.group_a)->capture_default_str();
    reproduce->add_option("--group-b", config.group_b)->capture_default_str();
    reproduce->add_option("--t-group", config.t_group, "group for the second comparison (benefit 2)");
    reproduce->add_option("--permutations", config.permutations)->capture_default_str();
    reproduce->add_option("--seed", config.seed)->capture_default_str();
    reproduce->add_option("--out", config.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }

    try {
        config.command = app.get_subcommands().front()->get_name();
        config.mode = mode == "control" ? Mode::control : mode == "none" ? Mode::none : Mode::maximize;
        if (pi0 == "estimate") {
            config.pi0 = {Pi0Mode::estimated, 1.0};
        } else if (pi0 == "one") {
            config.pi0 = {Pi0Mode::fixed_one, 1.0};
        } else {
            try {
                config.pi0 = {Pi0Mode::user_supplied, std::stod(pi0)};
            } catch (const std::exception&) {
                throw UsageError("--pi0 must be 'estimate', 'one' or a number");
            }
        }
        sim.truth = truth == "mixture" ? TruthMode::mixture : TruthMode::fixed;
        sim.permutations = sim_permutations;
        sim.seed = config.seed;

        if (config.command == "analyze") run_analyze(config);
        if (config.command == "simulate") run_simulate(config, out);
        if (config.command == "reproduce") run_reproduce(config, out);
        return kSuccess;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsageError;
    } catch (const Error& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternalError;
    }
}

}  // namespace dfdr::cli
