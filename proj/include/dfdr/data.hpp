#pragma once

#include <cmath>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace dfdr {

using Eigen::Index;

/// Feature-by-subject measurements with one group tag per subject.
struct DataMatrix {
    Eigen::MatrixXd values;                ///< features x subjects
    std::vector<std::string> feature_ids;  ///< one per row
    std::vector<std::string> subject_ids;  ///< one per column
    std::vector<std::string> labels;       ///< group tag per column

    Index features() const { return values.rows(); }
    Index subjects() const { return values.cols(); }

    /// Column indices labelled `group`, in matrix order.
    std::vector<Index> columns_in(std::string_view group) const;
    std::map<std::string, Index> group_sizes() const;

    /// Throws ValidationError unless dimensions agree, m >= 1, n >= 2 and IDs are unique.
    void validate() const;
};

/// Parses a TSV matrix (header row of subject IDs, first column of feature IDs)
/// and a two-column labels TSV (subject ID, group tag).
DataMatrix read_matrix(std::istream& matrix, std::istream& labels);
DataMatrix load_matrix(const std::filesystem::path& matrix, const std::filesystem::path& labels);

/// Rows `rows` of `matrix`, with IDs and labels carried over.
DataMatrix select_features(const DataMatrix& matrix, std::span<const Index> rows);

/// sign(x) * ln(1 + |x|), with 0 at x = 0.
template <typename Derived>
auto signed_log1p(const Eigen::ArrayBase<Derived>& x) {
    return x.unaryExpr([](typename Derived::Scalar v) {
        return v == 0 ? v : std::copysign(std::log1p(std::abs(v)), v);
    });
}

/// Divides every subject column by its median, then applies signed_log1p.
/// Throws PreprocessError naming the subject when a column median is zero.
DataMatrix preprocess(DataMatrix matrix);

}  // namespace dfdr
