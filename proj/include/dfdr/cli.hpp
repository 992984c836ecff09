#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dfdr/estimators.hpp"
#include "dfdr/simulation.hpp"

namespace dfdr::cli {

enum ExitCode : int { kSuccess = 0, kUsageError = 1, kDataError = 2, kInternalError = 3 };

enum class Mode { maximize, control, none };

struct RunConfig {
    std::string command;  ///< analyze | simulate | reproduce

    std::filesystem::path matrix;
    std::filesystem::path labels;
    std::filesystem::path pvalues;
    std::filesystem::path observed;
    std::filesystem::path null_stats;
    std::filesystem::path subsets;
    std::filesystem::path weights;
    std::filesystem::path out;

    std::string group_a = "ALL";
    std::string group_b = "AML";
    std::string t_group;  ///< reproduce: third group for the two-comparison example

    Mode mode = Mode::maximize;
    std::optional<double> cost_ratio;
    std::optional<double> p_threshold;
    double alpha = 0.05;
    Index permutations = 1000;
    std::uint64_t seed = 1;
    Pi0Choice pi0;
    bool preprocess = false;
    Index min_subset_size = 50;

    SimulationConfig simulation;

    /// Cost/benefit implied by --cost-ratio or --p-threshold (default p = 0.05).
    CostBenefit cost_benefit() const;
    /// Throws UsageError on an invalid flag combination.
    void validate() const;
};

/// Parses argv and dispatches; maps errors onto ExitCode. Messages go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Writes tests.csv, summary.txt and curve.csv (plus per-subset directories) under config.out.
void run_analyze(const RunConfig& config);
/// Writes report.txt under config.out and returns true when every bound check passed.
bool run_simulate(const RunConfig& config, std::ostream& out);
/// Prints computed vs published values; also writes reproduce.txt when config.out is set.
void run_reproduce(const RunConfig& config, std::ostream& out);

/// One number per non-empty line.
std::vector<double> read_column(const std::filesystem::path& path);

/// Writes through a temporary file and renames it into place.
void write_atomically(const std::filesystem::path& path, const std::string& contents);

/// Shortest round-trip text for a double ("inf" for infinity).
std::string format_number(double value);

}  // namespace dfdr::cli
